#ifndef MSR_CLASSIFY_HPP
#define MSR_CLASSIFY_HPP

#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "msr/common.hpp"
#include "msr/git.hpp"

namespace msr {

struct ClassifierConfig {
  enum class MatchMode { substring, word_boundary };

  // The literal defect-fix keyword list; substring mode mirrors it as a
  // plain regex would, word_boundary trades recall for precision.
  std::vector<std::string> keywords = {"bug",     "fix",  "error",  "crash",
                                       "problem", "fail", "defect", "patch"};
  MatchMode match_mode = MatchMode::substring;
  std::set<std::string> bug_labels = {"bug", "bugfix"};
  bool require_source_change = true;
};

struct IssueRecord {
  std::string id;
  std::set<std::string> labels;
  std::optional<std::int64_t> closed_at;
};

struct Classification {
  bool is_fix = false;
  std::vector<std::string> evidence;
};

/// Issue ids referenced by a commit message: `#123`, `GH-123` (both
/// normalized to the bare number) and `PROJ-123` tracker keys.
/// First-occurrence order, deduplicated.
inline std::vector<std::string> extract_issue_refs(const std::string& message) {
  static const std::regex pattern(R"((#\d+)|(GH-\d+)|([A-Z][A-Z0-9]*-\d+))");
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto begin = std::sregex_iterator(message.begin(), message.end(), pattern);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    std::string token;
    if (m[1].matched) token = m[1].str().substr(1);
    else if (m[2].matched) token = m[2].str().substr(3);
    else token = m[3].str();
    if (seen.insert(token).second) out.push_back(token);
  }
  return out;
}

namespace detail {

inline bool matches_keyword(const std::string& lower_message,
                            const std::string& keyword,
                            ClassifierConfig::MatchMode mode) {
  size_t pos = 0;
  while ((pos = lower_message.find(keyword, pos)) != std::string::npos) {
    if (mode == ClassifierConfig::MatchMode::substring) return true;
    bool left_ok = pos == 0 || !is_ascii_alnum(lower_message[pos - 1]);
    size_t end = pos + keyword.size();
    bool right_ok =
        end >= lower_message.size() || !is_ascii_alnum(lower_message[end]);
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

}  // namespace detail

/// Tags a commit as defect-fixing when its message matches a keyword or
/// a referenced issue carries a bug label. With require_source_change,
/// commits touching no source file are never fixes.
inline Classification classify_defect_fix(
    const CommitRecord& commit,
    const std::map<std::string, IssueRecord>* issues,
    const ClassifierConfig& cfg,
    const std::set<std::string>& source_extensions) {
  Classification result;
  if (cfg.require_source_change) {
    bool touches_source = false;
    for (const auto& m : commit.modifications)
      if (is_source_file(m.path, source_extensions)) touches_source = true;
    if (!touches_source) return result;
  }

  const std::string lower = to_lower(commit.message);
  for (const auto& kw : cfg.keywords)
    if (detail::matches_keyword(lower, kw, cfg.match_mode))
      result.evidence.push_back(kw);

  if (issues) {
    std::set<std::string> seen_labels;
    for (const auto& ref : extract_issue_refs(commit.message)) {
      auto it = issues->find(ref);
      if (it == issues->end()) continue;
      for (const auto& label : it->second.labels) {
        std::string lower_label = to_lower(label);
        if (cfg.bug_labels.count(lower_label) &&
            seen_labels.insert(lower_label).second)
          result.evidence.push_back("label:" + lower_label);
      }
    }
  }
  result.is_fix = !result.evidence.empty();
  return result;
}

// ---------------------------------------------------------------------------
// Issue file and classifier output serialization
// ---------------------------------------------------------------------------

inline std::map<std::string, IssueRecord> parse_issues(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_document, e.what());
  }
  if (!doc.is_array())
    throw Error(Errc::malformed_document, "issues must be a JSON array");
  std::map<std::string, IssueRecord> out;
  for (const auto& j : doc) {
    IssueRecord rec;
    try {
      rec.id = j.at("id").get<std::string>();
      for (const auto& l : j.value("labels", nlohmann::json::array()))
        rec.labels.insert(l.get<std::string>());
      if (j.contains("closed_at") && !j["closed_at"].is_null())
        rec.closed_at = j["closed_at"].get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::malformed_document, e.what());
    }
    if (rec.id.empty())
      throw Error(Errc::malformed_document, "issue with empty id");
    out[rec.id] = std::move(rec);
  }
  return out;
}

inline std::map<std::string, IssueRecord> load_issues(const std::string& path) {
  return parse_issues(read_file(path));
}

}  // namespace msr

#endif  // MSR_CLASSIFY_HPP
