#ifndef MSR_PIPELINE_HPP
#define MSR_PIPELINE_HPP

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "msr/catalog.hpp"
#include "msr/classify.hpp"
#include "msr/clean.hpp"
#include "msr/common.hpp"
#include "msr/dataset.hpp"
#include "msr/git.hpp"
#include "msr/manifest.hpp"
#include "msr/metrics.hpp"
#include "msr/plot.hpp"
#include "msr/report.hpp"
#include "msr/stats.hpp"
#include "msr/szz.hpp"
#include "msr/textstats.hpp"

namespace msr {

// Artifact names inside the output directory.
namespace artifact {
inline constexpr const char* selection = "selection.json";
inline constexpr const char* commits = "commits.jsonl";
inline constexpr const char* classifications = "classifications.jsonl";
inline constexpr const char* cleaning = "cleaning.json";
inline constexpr const char* links = "links.jsonl";
inline constexpr const char* labels = "labels.jsonl";
inline constexpr const char* dataset = "dataset.csv";
inline constexpr const char* terms = "terms.csv";
inline constexpr const char* top_terms = "top_terms.json";
inline constexpr const char* stats = "stats.csv";
inline constexpr const char* report = "report.md";
inline constexpr const char* plot_box = "plots/box_la.svg";
inline constexpr const char* plot_bar = "plots/bar_removals.svg";
inline constexpr const char* plot_line = "plots/line_commits.svg";
inline constexpr const char* package_dir = "package";
}  // namespace artifact

/// Optional post-selection sampling: an explicit size, or a Cochran
/// size computed from the accepted population.
struct SamplePlan {
  std::string strata = "primary_language";
  std::optional<std::int64_t> n;
  Confidence confidence = Confidence::c95;
  double margin = 0.05;
  double proportion = 0.5;
};

struct PipelineConfig {
  std::string repo_path;
  std::string out_dir;
  std::string manifest_path;
  std::string catalog_path;
  std::string criteria_path;
  std::string issues_path;
  ClassifierConfig classifier;
  CleaningConfig cleaning;
  TokenConfig tokens;
  std::set<std::string> source_extensions = default_source_extensions();
  SzzConfig szz;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> since;
  std::optional<std::int64_t> until;
  std::optional<std::int64_t> now;  // selection clock; wall clock when unset
  std::optional<SamplePlan> sample;
  double alpha = 0.05;
  size_t top_k = 10;
};

inline std::string out_path(const PipelineConfig& cfg, const char* name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

// ---------------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------------

inline PipelineConfig parse_pipeline_config(const std::string& text,
                                            const std::string& base_dir = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_config, e.what());
  }
  PipelineConfig cfg;
  auto resolve = [&](const std::string& p) {
    if (p.empty() || base_dir.empty()) return p;
    std::filesystem::path fp(p);
    return fp.is_absolute() ? p : (std::filesystem::path(base_dir) / fp).string();
  };
  try {
    cfg.repo_path = resolve(doc.value("repo", std::string()));
    cfg.out_dir = resolve(doc.value("out", std::string()));
    cfg.manifest_path = resolve(doc.value("manifest", std::string()));
    cfg.catalog_path = resolve(doc.value("catalog", std::string()));
    cfg.criteria_path = resolve(doc.value("criteria", std::string()));
    cfg.issues_path = resolve(doc.value("issues", std::string()));
    cfg.seed = doc.value("seed", std::uint64_t(0));
    if (doc.contains("since")) cfg.since = doc["since"].get<std::int64_t>();
    if (doc.contains("until")) cfg.until = doc["until"].get<std::int64_t>();
    if (doc.contains("source_extensions")) {
      cfg.source_extensions.clear();
      for (const auto& e : doc["source_extensions"])
        cfg.source_extensions.insert(to_lower(e.get<std::string>()));
    }
    if (doc.contains("classifier")) {
      const auto& c = doc["classifier"];
      if (c.contains("keywords")) {
        cfg.classifier.keywords.clear();
        for (const auto& k : c["keywords"])
          cfg.classifier.keywords.push_back(to_lower(k.get<std::string>()));
        if (cfg.classifier.keywords.empty())
          throw Error(Errc::bad_config, "classifier.keywords must be non-empty");
      }
      std::string mode = c.value("match_mode", std::string("substring"));
      if (mode == "substring")
        cfg.classifier.match_mode = ClassifierConfig::MatchMode::substring;
      else if (mode == "word_boundary")
        cfg.classifier.match_mode = ClassifierConfig::MatchMode::word_boundary;
      else
        throw Error(Errc::bad_config, "classifier.match_mode: " + mode);
      if (c.contains("bug_labels")) {
        cfg.classifier.bug_labels.clear();
        for (const auto& l : c["bug_labels"])
          cfg.classifier.bug_labels.insert(to_lower(l.get<std::string>()));
      }
      cfg.classifier.require_source_change =
          c.value("require_source_change", cfg.classifier.require_source_change);
    }
    if (doc.contains("cleaning")) {
      const auto& c = doc["cleaning"];
      cfg.cleaning.exclude_merges = c.value("exclude_merges", cfg.cleaning.exclude_merges);
      if (c.contains("bot_name_suffixes")) {
        cfg.cleaning.bot_name_suffixes.clear();
        for (const auto& s : c["bot_name_suffixes"])
          cfg.cleaning.bot_name_suffixes.insert(s.get<std::string>());
      }
      if (c.contains("bot_name_list")) {
        for (const auto& s : c["bot_name_list"])
          cfg.cleaning.bot_name_list.insert(s.get<std::string>());
      }
      if (c.contains("noisy_patterns")) {
        cfg.cleaning.noisy_patterns.clear();
        for (const auto& s : c["noisy_patterns"])
          cfg.cleaning.noisy_patterns.push_back(to_lower(s.get<std::string>()));
      }
      cfg.cleaning.quick_remedy_window_s =
          c.value("quick_remedy_window_s", cfg.cleaning.quick_remedy_window_s);
      cfg.cleaning.exclude_quick_remedy =
          c.value("exclude_quick_remedy", cfg.cleaning.exclude_quick_remedy);
      cfg.cleaning.tangled_dir_threshold =
          c.value("tangled_dir_threshold", cfg.cleaning.tangled_dir_threshold);
      cfg.cleaning.tangled_issue_refs_threshold = c.value(
          "tangled_issue_refs_threshold", cfg.cleaning.tangled_issue_refs_threshold);
      if (cfg.cleaning.quick_remedy_window_s <= 0 ||
          cfg.cleaning.tangled_dir_threshold < 1 ||
          cfg.cleaning.tangled_issue_refs_threshold < 1)
        throw Error(Errc::bad_config, "cleaning thresholds out of range");
    }
    if (doc.contains("szz")) {
      const auto& s = doc["szz"];
      std::string span = s.value("span", std::string("file"));
      if (span == "file") cfg.szz.span = SzzConfig::Span::file;
      else if (span == "all") cfg.szz.span = SzzConfig::Span::all;
      else throw Error(Errc::bad_config, "szz.span: " + span);
      cfg.szz.cosmetic_filter = s.value("cosmetic_filter", false);
    }
    if (doc.contains("tokens")) {
      const auto& t = doc["tokens"];
      cfg.tokens.lowercase = t.value("lowercase", true);
      if (t.contains("stopwords"))
        for (const auto& w : t["stopwords"])
          cfg.tokens.stopwords.insert(w.get<std::string>());
      cfg.tokens.min_token_len = t.value("min_token_len", size_t(2));
      if (cfg.tokens.min_token_len < 1)
        throw Error(Errc::bad_config, "tokens.min_token_len must be >= 1");
    }
    if (doc.contains("select")) {
      const auto& s = doc["select"];
      if (s.contains("now")) cfg.now = s["now"].get<std::int64_t>();
      if (s.contains("sample")) {
        const auto& sp = s["sample"];
        SamplePlan plan;
        plan.strata = sp.value("strata", plan.strata);
        if (sp.contains("n")) plan.n = sp["n"].get<std::int64_t>();
        std::string conf = sp.value("confidence", std::string("c95"));
        if (conf == "c90") plan.confidence = Confidence::c90;
        else if (conf == "c95") plan.confidence = Confidence::c95;
        else if (conf == "c99") plan.confidence = Confidence::c99;
        else throw Error(Errc::bad_config, "select.sample.confidence: " + conf);
        plan.margin = sp.value("margin", plan.margin);
        plan.proportion = sp.value("proportion", plan.proportion);
        cfg.sample = plan;
      }
    }
    if (doc.contains("stats")) cfg.alpha = doc["stats"].value("alpha", 0.05);
    if (doc.contains("textstats")) cfg.top_k = doc["textstats"].value("top_k", size_t(10));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_config, e.what());
  }
  cfg.szz.source_extensions = cfg.source_extensions;
  return cfg;
}

inline PipelineConfig load_pipeline_config(const std::string& path) {
  return parse_pipeline_config(
      read_file(path), std::filesystem::path(path).parent_path().string());
}

/// Analytical knobs only; machine-local paths stay out so the digest of
/// the effective config is stable across checkouts.
inline nlohmann::json effective_config_json(const PipelineConfig& cfg) {
  nlohmann::json j;
  j["seed"] = cfg.seed;
  if (cfg.since) j["since"] = *cfg.since;
  if (cfg.until) j["until"] = *cfg.until;
  j["source_extensions"] = cfg.source_extensions;
  j["classifier"] = {{"keywords", cfg.classifier.keywords},
                     {"match_mode",
                      cfg.classifier.match_mode == ClassifierConfig::MatchMode::substring
                          ? "substring"
                          : "word_boundary"},
                     {"bug_labels", cfg.classifier.bug_labels},
                     {"require_source_change", cfg.classifier.require_source_change}};
  j["cleaning"] = {{"exclude_merges", cfg.cleaning.exclude_merges},
                   {"bot_name_suffixes", cfg.cleaning.bot_name_suffixes},
                   {"bot_name_list", cfg.cleaning.bot_name_list},
                   {"noisy_patterns", cfg.cleaning.noisy_patterns},
                   {"quick_remedy_window_s", cfg.cleaning.quick_remedy_window_s},
                   {"exclude_quick_remedy", cfg.cleaning.exclude_quick_remedy},
                   {"tangled_dir_threshold", cfg.cleaning.tangled_dir_threshold},
                   {"tangled_issue_refs_threshold",
                    cfg.cleaning.tangled_issue_refs_threshold}};
  j["szz"] = {{"span", szz_span_name(cfg.szz.span)},
              {"cosmetic_filter", cfg.szz.cosmetic_filter}};
  if (cfg.now || cfg.sample) {
    nlohmann::json sel = nlohmann::json::object();
    if (cfg.now) sel["now"] = *cfg.now;
    if (cfg.sample) {
      const char* conf = cfg.sample->confidence == Confidence::c90   ? "c90"
                         : cfg.sample->confidence == Confidence::c95 ? "c95"
                                                                     : "c99";
      nlohmann::json sp = {{"strata", cfg.sample->strata},
                           {"confidence", conf},
                           {"margin", cfg.sample->margin},
                           {"proportion", cfg.sample->proportion}};
      if (cfg.sample->n) sp["n"] = *cfg.sample->n;
      sel["sample"] = sp;
    }
    j["select"] = sel;
  }
  j["tokens"] = {{"lowercase", cfg.tokens.lowercase},
                 {"stopwords", cfg.tokens.stopwords},
                 {"min_token_len", cfg.tokens.min_token_len}};
  j["stats"] = {{"alpha", cfg.alpha}};
  j["textstats"] = {{"top_k", cfg.top_k}};
  return j;
}

namespace detail {

inline void require_out_dir(const PipelineConfig& cfg) {
  if (cfg.out_dir.empty()) throw Error(Errc::bad_config, "no output directory");
  namespace fs = std::filesystem;
  auto canon = [](const std::string& p) {
    std::error_code ec;
    auto c = fs::weakly_canonical(p, ec);
    return ec ? fs::path(p) : c;
  };
  const auto out = canon(cfg.out_dir);
  for (const std::string& in :
       {cfg.manifest_path, cfg.catalog_path, cfg.criteria_path,
        cfg.issues_path, cfg.repo_path}) {
    if (!in.empty() && canon(in) == out)
      throw Error(Errc::bad_config, "output directory collides with input " + in);
  }
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
}

inline void sort_chronological(std::vector<CommitRecord>& commits) {
  std::sort(commits.begin(), commits.end(),
            [](const CommitRecord& a, const CommitRecord& b) {
              if (a.authored_at != b.authored_at)
                return a.authored_at < b.authored_at;
              return a.id < b.id;
            });
}

inline std::vector<CommitRecord> load_commits_chronological(
    const PipelineConfig& cfg) {
  auto commits = read_commits_jsonl(out_path(cfg, artifact::commits));
  sort_chronological(commits);
  return commits;
}

inline std::map<std::string, Classification> load_classifications(
    const PipelineConfig& cfg) {
  std::map<std::string, Classification> out;
  std::istringstream in(read_file(out_path(cfg, artifact::classifications)));
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    Classification c;
    c.is_fix = j.at("is_fix").get<bool>();
    for (const auto& e : j.value("evidence", nlohmann::json::array()))
      c.evidence.push_back(e.get<std::string>());
    out[j.at("commit_id").get<std::string>()] = std::move(c);
  }
  return out;
}

inline std::string repo_label(const PipelineConfig& cfg) {
  namespace fs = std::filesystem;
  fs::path p(cfg.repo_path);
  if (p.filename().string().empty()) p = p.parent_path();
  std::string name = p.filename().string();
  return name.empty() ? cfg.repo_path : name;
}

inline std::string month_key(std::int64_t unix_seconds) {
  std::time_t t = static_cast<std::time_t>(unix_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[16];
  std::strftime(buf, sizeof(buf), "%Y-%m", &tm);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Stages. Each one reads files the previous stages wrote, so any prefix
// of the pipeline can be re-run or graded in isolation.
// ---------------------------------------------------------------------------

inline void stage_select(const PipelineConfig& cfg) {
  detail::require_out_dir(cfg);
  if (cfg.catalog_path.empty() || cfg.criteria_path.empty())
    throw Error(Errc::bad_config, "select needs catalog and criteria paths");
  auto records = load_catalog(cfg.catalog_path);
  auto criteria = load_criteria(cfg.criteria_path);
  const std::int64_t now =
      cfg.now ? *cfg.now : static_cast<std::int64_t>(std::time(nullptr));
  auto report = apply_criteria(records, criteria, now);
  nlohmann::json j = selection_report_to_json(report);

  if (cfg.sample) {
    std::set<std::string> accepted(report.accepted.begin(), report.accepted.end());
    std::vector<RepoRecord> pool;
    for (const auto& r : records)
      if (accepted.count(r.id)) pool.push_back(r);
    std::int64_t n = cfg.sample->n
                         ? *cfg.sample->n
                         : (pool.empty()
                                ? 0
                                : compute_sample_size(
                                      static_cast<std::int64_t>(pool.size()),
                                      cfg.sample->confidence, cfg.sample->margin,
                                      cfg.sample->proportion));
    auto drawn = stratified_sample(pool, cfg.sample->strata,
                                   static_cast<size_t>(std::max<std::int64_t>(n, 0)),
                                   cfg.seed);
    nlohmann::json ids = nlohmann::json::array();
    for (const auto& r : drawn) ids.push_back(r.id);
    j["sampled"] = ids;
  }
  write_file(out_path(cfg, artifact::selection), j.dump(2) + "\n");
}

inline void stage_mine(const PipelineConfig& cfg) {
  detail::require_out_dir(cfg);
  if (cfg.repo_path.empty()) throw Error(Errc::bad_config, "mine needs a repository path");
  GitCli git(cfg.repo_path);
  auto commits = git.enumerate_commits(cfg.since, cfg.until);
  write_commits_jsonl(out_path(cfg, artifact::commits), commits);
}

inline void stage_classify(const PipelineConfig& cfg) {
  detail::require_out_dir(cfg);
  auto commits = read_commits_jsonl(out_path(cfg, artifact::commits));
  std::map<std::string, IssueRecord> issues;
  const std::map<std::string, IssueRecord>* issues_ptr = nullptr;
  if (!cfg.issues_path.empty()) {
    issues = load_issues(cfg.issues_path);
    issues_ptr = &issues;
  }
  std::string out;
  for (const auto& c : commits) {
    auto cls = classify_defect_fix(c, issues_ptr, cfg.classifier,
                                   cfg.source_extensions);
    nlohmann::json j = {{"commit_id", c.id},
                        {"is_fix", cls.is_fix},
                        {"evidence", cls.evidence}};
    out += j.dump() + "\n";
  }
  write_file(out_path(cfg, artifact::classifications), out);
}

inline void stage_clean(const PipelineConfig& cfg) {
  detail::require_out_dir(cfg);
  auto commits = detail::load_commits_chronological(cfg);
  auto [kept, report] = clean(commits, cfg.cleaning);
  write_file(out_path(cfg, artifact::cleaning),
             cleaning_report_to_json(report).dump(2) + "\n");
}

inline void stage_szz(const PipelineConfig& cfg) {
  detail::require_out_dir(cfg);
  if (cfg.repo_path.empty()) throw Error(Errc::bad_config, "szz needs a repository path");
  auto commits = detail::load_commits_chronological(cfg);
  auto classifications = detail::load_classifications(cfg);
  auto cleaning = cleaning_report_from_json(
      nlohmann::json::parse(read_file(out_path(cfg, artifact::cleaning))));
  std::set<std::string> kept(cleaning.kept.begin(), cleaning.kept.end());

  GitCli git(cfg.repo_path);
  std::vector<DefectLink> links;
  // most recent fixes first, matching the usual walk direction
  for (auto it = commits.rbegin(); it != commits.rend(); ++it) {
    const CommitRecord& c = *it;
    if (!kept.count(c.id)) continue;
    auto cls = classifications.find(c.id);
    if (cls == classifications.end() || !cls->second.is_fix) continue;
    for (const auto& file : identify_fixed_files(c, cfg.szz.source_extensions)) {
      auto link = locate_inducing(c, file, git, cfg.szz);
      if (link) links.push_back(std::move(*link));
    }
  }
  std::string links_out;
  for (const auto& l : links) links_out += link_to_json(l).dump() + "\n";
  write_file(out_path(cfg, artifact::links), links_out);

  auto labels = label_failure_prone(links, commits, cfg.szz.span);
  std::string labels_out;
  for (const auto& l : labels) labels_out += label_to_json(l).dump() + "\n";
  write_file(out_path(cfg, artifact::labels), labels_out);
}

inline void stage_metrics(const PipelineConfig& cfg) {
  detail::require_out_dir(cfg);
  if (cfg.repo_path.empty()) throw Error(Errc::bad_config, "metrics needs a repository path");
  auto commits = detail::load_commits_chronological(cfg);
  auto classifications = detail::load_classifications(cfg);
  auto cleaning = cleaning_report_from_json(
      nlohmann::json::parse(read_file(out_path(cfg, artifact::cleaning))));
  std::set<std::string> kept(cleaning.kept.begin(), cleaning.kept.end());
  std::set<std::string> tangled(cleaning.flagged_tangled.begin(),
                                cleaning.flagged_tangled.end());
  std::map<std::string, bool> failure_prone;
  {
    std::istringstream in(read_file(out_path(cfg, artifact::labels)));
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto lc = label_from_json(nlohmann::json::parse(line));
      failure_prone[lc.commit_id] = lc.failure_prone;
    }
  }

  GitCli git(cfg.repo_path);
  const std::string repo = detail::repo_label(cfg);
  HistoryIndex index;
  std::vector<DatasetRow> rows;
  // The index folds every mined commit (history happened regardless of
  // cleaning); only kept commits receive dataset rows.
  for (const auto& c : commits) {
    if (kept.count(c.id) && !c.modifications.empty()) {
      bool fix = false;
      auto cls = classifications.find(c.id);
      if (cls != classifications.end()) fix = cls->second.is_fix;
      DatasetRow row;
      row.repo = repo;
      row.metrics = compute_metrics(c, fix, index, git, cfg.source_extensions);
      auto fp = failure_prone.find(c.id);
      row.failure_prone = fp != failure_prone.end() && fp->second;
      row.flagged_tangled = tangled.count(c.id) > 0;
      rows.push_back(std::move(row));
    }
    index.fold(c);
  }
  write_dataset_csv(rows, out_path(cfg, artifact::dataset));
}

inline void stage_textstats(const PipelineConfig& cfg) {
  detail::require_out_dir(cfg);
  auto commits = detail::load_commits_chronological(cfg);
  auto classifications = detail::load_classifications(cfg);
  auto cleaning = cleaning_report_from_json(
      nlohmann::json::parse(read_file(out_path(cfg, artifact::cleaning))));
  std::set<std::string> kept(cleaning.kept.begin(), cleaning.kept.end());

  std::vector<std::vector<std::string>> docs;
  std::vector<std::string> ids;
  std::set<std::string> fix_ids, other_ids;
  for (const auto& c : commits) {
    if (!kept.count(c.id)) continue;
    docs.push_back(tokenize(c.message, cfg.tokens));
    ids.push_back(c.id);
    auto cls = classifications.find(c.id);
    if (cls != classifications.end() && cls->second.is_fix) fix_ids.insert(c.id);
    else other_ids.insert(c.id);
  }
  TermWeights w = compute_tfidf(docs, ids);

  std::string terms_csv = "term,df,idf\n";
  for (size_t i = 0; i < w.terms.size(); ++i)
    terms_csv += csv_quote(w.terms[i]) + ',' + std::to_string(w.doc_freq[i]) +
                 ',' + format_fixed6(w.idf[i]) + '\n';
  write_file(out_path(cfg, artifact::terms), terms_csv);

  auto table = [&](const std::set<std::string>& subset) {
    nlohmann::json arr = nlohmann::json::array();
    if (!subset.empty()) {
      for (const auto& [term, weight] : top_terms(w, subset, cfg.top_k))
        arr.push_back({{"term", term}, {"weight", format_fixed6(weight)}});
    }
    return arr;
  };
  nlohmann::json top = {{"fix", table(fix_ids)}, {"other", table(other_ids)}};
  write_file(out_path(cfg, artifact::top_terms), top.dump(2) + "\n");
}

/// Mann-Whitney + Cliff's delta for every metric column, failure-prone
/// rows against the rest, Bonferroni-corrected across the columns that
/// could be tested.
inline std::vector<StatsRow> compute_stats_rows(const std::vector<DatasetRow>& rows,
                                                double alpha) {
  std::vector<StatsRow> out;
  std::vector<double> p_values;
  for (const auto& name : metric_column_names()) {
    std::vector<double> fp, clean_group;
    for (const auto& r : rows) {
      auto v = detail::dataset_column(r, name);
      if (!v) continue;
      (r.failure_prone ? fp : clean_group).push_back(*v);
    }
    StatsRow row;
    row.metric = name;
    row.group_a_n = fp.size();
    row.group_b_n = clean_group.size();
    if (!fp.empty() && !clean_group.empty()) {
      TestResult t = mann_whitney(fp, clean_group);
      Effect e = cliffs_delta(fp, clean_group);
      row.computed = true;
      row.u = t.statistic;
      row.p = t.p_value;
      row.method = t.method;
      row.delta = e.delta;
      row.magnitude = e.magnitude;
      p_values.push_back(t.p_value);
    }
    out.push_back(std::move(row));
  }
  if (!p_values.empty()) {
    auto corrected = bonferroni(p_values, alpha);
    size_t k = 0;
    for (auto& row : out)
      if (row.computed) row.significant = corrected[k++].second;
  }
  return out;
}

inline void stage_stats(const PipelineConfig& cfg) {
  detail::require_out_dir(cfg);
  auto rows = read_dataset_csv(out_path(cfg, artifact::dataset));
  write_file(out_path(cfg, artifact::stats),
             stats_rows_to_csv(compute_stats_rows(rows, cfg.alpha)));
}

inline void stage_report(const PipelineConfig& cfg) {
  detail::require_out_dir(cfg);
  if (cfg.manifest_path.empty())
    throw Error(Errc::bad_config, "report needs the study manifest path");
  StudyManifest manifest = parse_manifest(read_file(cfg.manifest_path));

  ReportInputs in;
  namespace fs = std::filesystem;
  if (fs::exists(out_path(cfg, artifact::selection)))
    in.selection = selection_report_from_json(
        nlohmann::json::parse(read_file(out_path(cfg, artifact::selection))));
  in.cleaning = cleaning_report_from_json(
      nlohmann::json::parse(read_file(out_path(cfg, artifact::cleaning))));
  auto commits = detail::load_commits_chronological(cfg);
  in.mined_count = commits.size();
  auto classifications = detail::load_classifications(cfg);
  for (const auto& [id, cls] : classifications)
    if (cls.is_fix) ++in.fix_count;
  {
    std::istringstream links_in(read_file(out_path(cfg, artifact::links)));
    std::string line;
    while (std::getline(links_in, line))
      if (!trim(line).empty()) ++in.link_count;
  }
  {
    std::istringstream labels_in(read_file(out_path(cfg, artifact::labels)));
    std::string line;
    while (std::getline(labels_in, line)) {
      if (trim(line).empty()) continue;
      if (label_from_json(nlohmann::json::parse(line)).failure_prone)
        ++in.failure_prone_count;
    }
  }
  in.szz_span = szz_span_name(cfg.szz.span);
  in.dataset = read_dataset_csv(out_path(cfg, artifact::dataset));
  in.stats = compute_stats_rows(in.dataset, cfg.alpha);
  if (fs::exists(out_path(cfg, artifact::top_terms))) {
    auto top = nlohmann::json::parse(read_file(out_path(cfg, artifact::top_terms)));
    for (const auto& e : top.value("fix", nlohmann::json::array()))
      in.top_terms_fix.emplace_back(e.at("term").get<std::string>(),
                                    std::stod(e.at("weight").get<std::string>()));
    for (const auto& e : top.value("other", nlohmann::json::array()))
      in.top_terms_other.emplace_back(e.at("term").get<std::string>(),
                                      std::stod(e.at("weight").get<std::string>()));
  }

  // plots
  {
    std::vector<Series> groups;
    std::vector<double> fp, clean_group;
    for (const auto& r : in.dataset)
      (r.failure_prone ? fp : clean_group)
          .push_back(static_cast<double>(r.metrics.la));
    if (!fp.empty()) groups.push_back({"failure-prone", fp});
    if (!clean_group.empty()) groups.push_back({"clean", clean_group});
    if (!groups.empty()) {
      render_plot(PlotKind::box, groups, "Lines added per commit",
                  out_path(cfg, artifact::plot_box));
      in.plot_files.push_back(artifact::plot_box);
    }
  }
  {
    std::map<std::string, size_t> by_reason;
    for (const auto& [id, reason] : in.cleaning.removed)
      by_reason[removal_reason_name(reason)] += 1;
    std::vector<Series> bars;
    for (const char* reason : {"MERGE", "BOT", "NOISY", "QUICK_REMEDY"}) {
      auto it = by_reason.find(reason);
      bars.push_back({reason, {static_cast<double>(
                                  it == by_reason.end() ? 0 : it->second)}});
    }
    render_plot(PlotKind::bar, bars, "Removed commits by reason",
                out_path(cfg, artifact::plot_bar));
    in.plot_files.push_back(artifact::plot_bar);
  }
  {
    std::map<std::string, size_t> per_month;
    for (const auto& c : commits) per_month[detail::month_key(c.authored_at)] += 1;
    std::vector<Series> line;
    for (const auto& [month, count] : per_month)
      line.push_back({month, {static_cast<double>(count)}});
    if (!line.empty()) {
      render_plot(PlotKind::line, line, "Commits per month",
                  out_path(cfg, artifact::plot_line));
      in.plot_files.push_back(artifact::plot_line);
    }
  }

  write_file(out_path(cfg, artifact::report), render_report(manifest, in));
}

inline ReplicationManifest stage_package(const PipelineConfig& cfg,
                                         bool verify_only = false) {
  detail::require_out_dir(cfg);
  namespace fs = std::filesystem;
  const std::string package_dir = out_path(cfg, artifact::package_dir);
  if (verify_only) return verify_replication_package(package_dir);

  std::vector<std::pair<std::string, std::string>> artifacts;
  for (const char* name :
       {artifact::selection, artifact::commits, artifact::classifications,
        artifact::cleaning, artifact::links, artifact::labels,
        artifact::dataset, artifact::terms, artifact::top_terms,
        artifact::stats, artifact::report, artifact::plot_box,
        artifact::plot_bar, artifact::plot_line}) {
    const std::string src = out_path(cfg, name);
    if (fs::exists(src)) artifacts.emplace_back(src, name);
  }
  if (artifacts.empty())
    throw Error(Errc::missing_artifact, "no pipeline artifacts in " + cfg.out_dir);

  std::map<std::string, std::string> config_texts;
  config_texts["effective_config.json"] = effective_config_json(cfg).dump(2) + "\n";
  if (!cfg.manifest_path.empty() && fs::exists(cfg.manifest_path))
    config_texts["study_manifest.json"] = read_file(cfg.manifest_path);

  std::map<std::string, std::string> inputs;
  if (!cfg.manifest_path.empty() && fs::exists(cfg.manifest_path))
    inputs["manifest"] = cfg.manifest_path;
  if (!cfg.catalog_path.empty() && fs::exists(cfg.catalog_path))
    inputs["catalog"] = cfg.catalog_path;
  if (!cfg.criteria_path.empty() && fs::exists(cfg.criteria_path))
    inputs["criteria"] = cfg.criteria_path;
  if (!cfg.issues_path.empty() && fs::exists(cfg.issues_path))
    inputs["issues"] = cfg.issues_path;

  return write_replication_package(package_dir, artifacts, config_texts,
                                   inputs, szz_span_name(cfg.szz.span));
}

/// The whole workflow in stage order; `select` only participates when a
/// catalog and criteria are configured.
inline void run_pipeline(const PipelineConfig& cfg) {
  detail::require_out_dir(cfg);
  if (!cfg.catalog_path.empty() && !cfg.criteria_path.empty()) stage_select(cfg);
  stage_mine(cfg);
  stage_classify(cfg);
  stage_clean(cfg);
  stage_szz(cfg);
  stage_metrics(cfg);
  stage_textstats(cfg);
  stage_stats(cfg);
  stage_report(cfg);
  stage_package(cfg);
}

}  // namespace msr

#endif  // MSR_PIPELINE_HPP
