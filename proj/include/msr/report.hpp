#ifndef MSR_REPORT_HPP
#define MSR_REPORT_HPP

#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msr/catalog.hpp"
#include "msr/clean.hpp"
#include "msr/common.hpp"
#include "msr/dataset.hpp"
#include "msr/manifest.hpp"
#include "msr/sha256.hpp"
#include "msr/stats.hpp"
#include "msr/szz.hpp"

namespace msr {

/// One line of the statistical results table
/// (metric,group_a_n,group_b_n,U,p,method,delta,magnitude,significant_bonferroni).
struct StatsRow {
  std::string metric;
  size_t group_a_n = 0;
  size_t group_b_n = 0;
  bool computed = false;  // false when a group was empty
  double u = 0.0;
  double p = 1.0;
  TestMethod method = TestMethod::normal_approx;
  double delta = 0.0;
  Magnitude magnitude = Magnitude::negligible;
  bool significant = false;
};

inline std::string stats_rows_to_csv(const std::vector<StatsRow>& rows) {
  std::string out =
      "metric,group_a_n,group_b_n,U,p,method,delta,magnitude,"
      "significant_bonferroni\n";
  for (const auto& r : rows) {
    out += r.metric + ',' + std::to_string(r.group_a_n) + ',' +
           std::to_string(r.group_b_n) + ',';
    if (r.computed) {
      out += format_fixed6(r.u) + ',' + format_fixed6(r.p) + ',' +
             test_method_name(r.method) + ',' + format_fixed6(r.delta) + ',' +
             magnitude_name(r.magnitude) + ',' +
             (r.significant ? "true" : "false");
    } else {
      out += "NA,NA,NA,NA,NA,false";
    }
    out += '\n';
  }
  return out;
}

/// Everything the markdown report draws on.
struct ReportInputs {
  std::optional<SelectionReport> selection;
  CleaningReport cleaning;
  size_t mined_count = 0;
  size_t fix_count = 0;
  size_t link_count = 0;
  size_t failure_prone_count = 0;
  std::string szz_span = "file";
  std::vector<DatasetRow> dataset;
  std::vector<StatsRow> stats;
  std::vector<std::pair<std::string, double>> top_terms_fix;
  std::vector<std::pair<std::string, double>> top_terms_other;
  std::vector<std::string> plot_files;
};

namespace detail {

inline std::optional<double> dataset_column(const DatasetRow& r,
                                            const std::string& name) {
  const ChangeMetrics& m = r.metrics;
  if (name == "ns") return static_cast<double>(m.ns);
  if (name == "nd") return static_cast<double>(m.nd);
  if (name == "nf") return static_cast<double>(m.nf);
  if (name == "entropy") return m.entropy;
  if (name == "la") return static_cast<double>(m.la);
  if (name == "ld") return static_cast<double>(m.ld);
  if (name == "lt") return m.lt;
  if (name == "fix") return m.fix ? 1.0 : 0.0;
  if (name == "ndev") return static_cast<double>(m.ndev);
  if (name == "age") return m.age;
  if (name == "nuc") return static_cast<double>(m.nuc);
  if (name == "exp") return static_cast<double>(m.exp);
  if (name == "rexp") return m.rexp;
  if (name == "sexp") return static_cast<double>(m.sexp);
  return std::nullopt;
}

}  // namespace detail

inline const std::vector<std::string>& metric_column_names() {
  static const std::vector<std::string> names = {
      "ns", "nd", "nf", "entropy", "la",  "ld",   "lt",   "fix",
      "ndev", "age", "nuc", "exp",  "rexp", "sexp"};
  return names;
}

/// Renders the markdown study report. Section order is fixed: goal,
/// per-question findings, cleaning summary, pipeline summaries, threats,
/// plot references.
inline std::string render_report(const StudyManifest& manifest,
                                 const ReportInputs& in) {
  std::string md;
  md += "# Study Report\n\n";
  md += "## Goal\n\n";
  md += render_goal_statement(manifest.goal) + "\n\n";

  md += "## Research Questions\n\n";
  for (const auto& q : manifest.questions) {
    md += "### " + q.id + ": " + q.text + "\n\n";
    md += "| metric | n | mean | median | std | min | max |\n";
    md += "|---|---|---|---|---|---|---|\n";
    for (const auto& mid : q.metric_ids) {
      std::vector<double> column;
      for (const auto& row : in.dataset) {
        auto v = detail::dataset_column(row, mid);
        if (v) column.push_back(*v);
      }
      if (!column.empty()) {
        Summary s = describe(column);
        md += "| " + mid + " | " + std::to_string(s.n) + " | " +
              format_fixed6(s.mean) + " | " + format_fixed6(s.median) + " | " +
              format_fixed6(s.sample_std) + " | " + format_fixed6(s.min) +
              " | " + format_fixed6(s.max) + " |\n";
      } else {
        md += "| " + mid + " | - | - | - | - | - | - |\n";
      }
    }
    md += "\n";
  }

  md += "## Cleaning Summary\n\n";
  std::map<std::string, size_t> by_reason;
  for (const auto& [id, reason] : in.cleaning.removed)
    by_reason[removal_reason_name(reason)] += 1;
  md += "Mined " + std::to_string(in.mined_count) + " commits; kept " +
        std::to_string(in.cleaning.kept.size()) + ", removed " +
        std::to_string(in.cleaning.removed.size()) + ", flagged tangled " +
        std::to_string(in.cleaning.flagged_tangled.size()) + ".\n\n";
  md += "| reason | removed |\n|---|---|\n";
  for (const char* reason : {"MERGE", "BOT", "NOISY", "QUICK_REMEDY"}) {
    auto it = by_reason.find(reason);
    md += std::string("| ") + reason + " | " +
          std::to_string(it == by_reason.end() ? 0 : it->second) + " |\n";
  }
  md += "\n";

  if (in.selection) {
    md += "## Repository Selection\n\n";
    md += "Accepted " + std::to_string(in.selection->accepted.size()) +
          ", rejected " + std::to_string(in.selection->rejected.size()) +
          " repositories.\n\n";
  }

  md += "## Classification and SZZ\n\n";
  md += std::to_string(in.fix_count) + " defect-fixing commits, " +
        std::to_string(in.link_count) + " defect links, " +
        std::to_string(in.failure_prone_count) +
        " commits labeled failure-prone (span mode: " + in.szz_span + ").\n\n";

  if (!in.stats.empty()) {
    md += "## Metric Comparison (failure-prone vs. clean)\n\n";
    md += "| metric | n(fp) | n(clean) | U | p | method | delta | magnitude | "
          "significant |\n";
    md += "|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : in.stats) {
      md += "| " + r.metric + " | " + std::to_string(r.group_a_n) + " | " +
            std::to_string(r.group_b_n) + " | ";
      if (r.computed) {
        md += format_fixed6(r.u) + " | " + format_fixed6(r.p) + " | " +
              test_method_name(r.method) + " | " + format_fixed6(r.delta) +
              " | " + magnitude_name(r.magnitude) + " | " +
              (r.significant ? "yes" : "no");
      } else {
        md += "- | - | - | - | - | no";
      }
      md += " |\n";
    }
    md += "\n";
  }

  if (!in.top_terms_fix.empty() || !in.top_terms_other.empty()) {
    md += "## Message Terms (TF-IDF)\n\n";
    auto table = [&](const char* caption,
                     const std::vector<std::pair<std::string, double>>& terms) {
      md += std::string("**") + caption + "**\n\n| term | weight |\n|---|---|\n";
      for (const auto& [term, weight] : terms)
        md += "| " + term + " | " + format_fixed6(weight) + " |\n";
      md += "\n";
    };
    table("Defect-fixing commits", in.top_terms_fix);
    table("Other commits", in.top_terms_other);
  }

  md += "## Threats to Validity\n\n";
  if (!in.cleaning.flagged_tangled.empty())
    md += "- " + std::to_string(in.cleaning.flagged_tangled.size()) +
          " commits look tangled (many directories or several issue "
          "references); they stay in the dataset but their rows may mix "
          "unrelated changes.\n";
  if (in.selection) {
    for (const auto& w : in.selection->warnings) md += "- " + w + "\n";
  }
  md += "- Rename detection is disabled during mining; renamed files appear "
        "as delete+add, which keeps line attribution deterministic but "
        "splits their history.\n";
  md += "- SZZ span interpretation: '" + in.szz_span +
        "' (commits between inducing and fix" +
        (in.szz_span == "file" ? ", restricted to the fixed file" : "") +
        "). The alternative reading changes which commits are labeled.\n";
  md += "- Keyword classification in substring mode matches inside words "
        "(e.g. 'debugging' contains 'bug'); word-boundary mode trades "
        "recall for precision.\n";
  md += "- Commit messages were not stemmed before TF-IDF.\n";
  md += "\n";

  if (!in.plot_files.empty()) {
    md += "## Plots\n\n";
    for (const auto& p : in.plot_files)
      md += "![" + p + "](" + p + ")\n";
    md += "\n";
  }
  return md;
}

// ---------------------------------------------------------------------------
// Replication package
// ---------------------------------------------------------------------------

struct ArtifactEntry {
  std::string path;  // relative to the package directory
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct ReplicationManifest {
  std::string tool_version;
  std::string created_at;  // wall clock; excluded from any digest
  std::string szz_span;
  std::map<std::string, std::string> config_digests;
  std::map<std::string, std::string> input_digests;
  std::vector<ArtifactEntry> artifacts;
};

inline nlohmann::json replication_manifest_to_json(const ReplicationManifest& m) {
  nlohmann::json j;
  j["tool_version"] = m.tool_version;
  j["created_at"] = m.created_at;
  j["szz_span"] = m.szz_span;
  j["config_digests"] = m.config_digests;
  j["input_digests"] = m.input_digests;
  j["artifacts"] = nlohmann::json::array();
  for (const auto& a : m.artifacts)
    j["artifacts"].push_back(
        {{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  return j;
}

inline ReplicationManifest replication_manifest_from_json(const nlohmann::json& j) {
  ReplicationManifest m;
  try {
    m.tool_version = j.value("tool_version", std::string());
    m.created_at = j.value("created_at", std::string());
    m.szz_span = j.value("szz_span", std::string());
    if (j.contains("config_digests"))
      for (const auto& [k, v] : j["config_digests"].items())
        m.config_digests[k] = v.get<std::string>();
    if (j.contains("input_digests"))
      for (const auto& [k, v] : j["input_digests"].items())
        m.input_digests[k] = v.get<std::string>();
    for (const auto& a : j.value("artifacts", nlohmann::json::array()))
      m.artifacts.push_back({a.at("path").get<std::string>(),
                             a.at("sha256").get<std::string>(),
                             a.value("bytes", std::uint64_t(0))});
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_document, e.what());
  }
  return m;
}

/// Copies artifacts into `package_dir`, writes extra config texts, and
/// emits replication_manifest.json with SHA-256 digests of everything.
inline ReplicationManifest write_replication_package(
    const std::string& package_dir,
    const std::vector<std::pair<std::string, std::string>>& artifacts,  // src, rel
    const std::map<std::string, std::string>& config_texts,             // rel, body
    const std::map<std::string, std::string>& input_files,              // label, path
    const std::string& szz_span) {
  namespace fs = std::filesystem;
  ReplicationManifest manifest;
  manifest.tool_version = kToolVersion;
  manifest.szz_span = szz_span;
  {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    manifest.created_at = buf;
  }

  for (const auto& [rel, body] : config_texts) {
    write_file((fs::path(package_dir) / rel).string(), body);
    manifest.config_digests[rel] = sha256_hex(body);
    manifest.artifacts.push_back({rel, sha256_hex(body), body.size()});
  }
  for (const auto& [src, rel] : artifacts) {
    if (!fs::exists(src)) throw Error(Errc::missing_artifact, src);
    std::string body = read_file(src);
    write_file((fs::path(package_dir) / rel).string(), body);
    manifest.artifacts.push_back({rel, sha256_hex(body), body.size()});
  }
  for (const auto& [label, path] : input_files) {
    if (!fs::exists(path)) throw Error(Errc::missing_artifact, path);
    manifest.input_digests[label] = sha256_file(path);
  }
  std::sort(manifest.artifacts.begin(), manifest.artifacts.end(),
            [](const ArtifactEntry& a, const ArtifactEntry& b) {
              return a.path < b.path;
            });

  write_file((fs::path(package_dir) / "replication_manifest.json").string(),
             replication_manifest_to_json(manifest).dump(2) + "\n");
  return manifest;
}

/// Recomputes every artifact digest recorded in the manifest; throws on
/// the first missing or altered file.
inline ReplicationManifest verify_replication_package(const std::string& package_dir) {
  namespace fs = std::filesystem;
  const std::string manifest_path =
      (fs::path(package_dir) / "replication_manifest.json").string();
  if (!fs::exists(manifest_path))
    throw Error(Errc::missing_artifact, manifest_path);
  ReplicationManifest m;
  try {
    m = replication_manifest_from_json(nlohmann::json::parse(read_file(manifest_path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_document, e.what());
  }
  for (const auto& a : m.artifacts) {
    const std::string p = (fs::path(package_dir) / a.path).string();
    if (!fs::exists(p)) throw Error(Errc::missing_artifact, a.path);
    const std::string digest = sha256_file(p);
    if (digest != a.sha256)
      throw Error(Errc::digest_mismatch,
                  a.path + " expected " + a.sha256 + " got " + digest);
  }
  return m;
}

}  // namespace msr

#endif  // MSR_REPORT_HPP
