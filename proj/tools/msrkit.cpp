// msrkit - repository mining pipeline driver.
//
// Subcommands mirror the pipeline stages and exchange data through
// files in the output directory, so each stage can run (and be graded)
// on its own. Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "msr/pipeline.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string repo;
  std::string out;
  std::string span;
  std::string since;
  std::string until;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool verify = false;
};

msr::PipelineConfig effective_config(const CliOptions& opt) {
  msr::PipelineConfig cfg;
  if (!opt.config_path.empty()) cfg = msr::load_pipeline_config(opt.config_path);
  // flags override the config file
  if (!opt.repo.empty()) cfg.repo_path = opt.repo;
  if (!opt.out.empty()) cfg.out_dir = opt.out;
  if (opt.seed_set) cfg.seed = opt.seed;
  if (!opt.span.empty()) {
    if (opt.span == "file") cfg.szz.span = msr::SzzConfig::Span::file;
    else if (opt.span == "all") cfg.szz.span = msr::SzzConfig::Span::all;
    else throw msr::Error(msr::Errc::bad_config, "--span must be file or all");
  }
  auto parse_ts = [](const std::string& s, const char* flag) {
    try {
      size_t used = 0;
      std::int64_t v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw msr::Error(msr::Errc::bad_config,
                       std::string(flag) + " expects unix seconds, got " + s);
    }
  };
  if (!opt.since.empty()) cfg.since = parse_ts(opt.since, "--since");
  if (!opt.until.empty()) cfg.until = parse_ts(opt.until, "--until");
  return cfg;
}

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path, "JSON pipeline configuration");
  cmd->add_option("--repo", opt.repo, "local git repository to mine");
  cmd->add_option("--out", opt.out, "output directory for stage artifacts");
  cmd->add_option("--seed", opt.seed, "seed for sampling")
      ->each([&](const std::string&) { opt.seed_set = true; });
  cmd->add_option("--span", opt.span, "SZZ span interpretation: file | all");
  cmd->add_option("--since", opt.since, "only commits authored at/after (unix seconds)");
  cmd->add_option("--until", opt.until, "only commits authored at/before (unix seconds)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"msrkit - mine, clean, label and analyze git repositories"};
  app.require_subcommand(1);

  CliOptions opt;
  std::function<void(const msr::PipelineConfig&)> action;

  struct StageCmd {
    const char* name;
    const char* help;
    void (*fn)(const msr::PipelineConfig&);
  };
  const StageCmd stages[] = {
      {"select", "apply selection criteria to a repository catalog", msr::stage_select},
      {"mine", "extract commit history from the repository", msr::stage_mine},
      {"classify", "tag defect-fixing commits", msr::stage_classify},
      {"clean", "filter merge/bot/noisy/quick-remedy commits", msr::stage_clean},
      {"szz", "locate defect-inducing commits and label the span", msr::stage_szz},
      {"metrics", "compute the 14 change metrics into dataset.csv", msr::stage_metrics},
      {"textstats", "tokenize messages and compute TF-IDF tables", msr::stage_textstats},
      {"stats", "compare metric distributions across groups", msr::stage_stats},
      {"report", "render the markdown report and plots", msr::stage_report},
  };
  for (const auto& s : stages) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common_flags(cmd, opt);
    cmd->callback([&action, fn = s.fn] { action = fn; });
  }
  {
    CLI::App* cmd = app.add_subcommand(
        "package", "bundle artifacts into a digest-verified replication package");
    add_common_flags(cmd, opt);
    cmd->add_flag("--verify", opt.verify,
                  "recompute digests of an existing package instead of writing");
    cmd->callback([&action, &opt] {
      action = [&opt](const msr::PipelineConfig& cfg) {
        msr::stage_package(cfg, opt.verify);
        if (opt.verify) std::cerr << "package digests verified\n";
      };
    });
  }
  {
    CLI::App* cmd = app.add_subcommand("run", "run the whole pipeline");
    add_common_flags(cmd, opt);
    cmd->callback([&action] { action = msr::run_pipeline; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 1;
  }

  msr::PipelineConfig cfg;
  try {
    cfg = effective_config(opt);
  } catch (const msr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  // missing required inputs are usage errors, not data errors
  const std::string sub = app.get_subcommands().front()->get_name();
  auto usage_error = [&](const std::string& what) {
    std::cerr << sub << ": " << what << "\n" << app.help();
    return 1;
  };
  if (cfg.out_dir.empty()) return usage_error("--out (or config 'out') is required");
  if ((sub == "mine" || sub == "szz" || sub == "metrics" || sub == "run") &&
      cfg.repo_path.empty())
    return usage_error("--repo (or config 'repo') is required");
  if (sub == "select" && (cfg.catalog_path.empty() || cfg.criteria_path.empty()))
    return usage_error("a config with 'catalog' and 'criteria' paths is required");
  if ((sub == "report" || sub == "run") && cfg.manifest_path.empty())
    return usage_error("a config with a 'manifest' path is required");

  try {
    action(cfg);
  } catch (const msr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
