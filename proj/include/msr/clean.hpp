#ifndef MSR_CLEAN_HPP
#define MSR_CLEAN_HPP

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "msr/common.hpp"
#include "msr/classify.hpp"
#include "msr/git.hpp"

namespace msr {

struct CleaningConfig {
  bool exclude_merges = true;
  std::set<std::string> bot_name_suffixes = {"[bot]"};
  std::set<std::string> bot_name_list;
  std::vector<std::string> noisy_patterns = {"typo", "lint", "rename task",
                                             "formatting"};
  std::int64_t quick_remedy_window_s = 300;
  bool exclude_quick_remedy = true;
  std::int64_t tangled_dir_threshold = 5;
  std::int64_t tangled_issue_refs_threshold = 2;
};

enum class RemovalReason { MERGE, BOT, NOISY, QUICK_REMEDY };

inline const char* removal_reason_name(RemovalReason r) {
  switch (r) {
    case RemovalReason::MERGE: return "MERGE";
    case RemovalReason::BOT: return "BOT";
    case RemovalReason::NOISY: return "NOISY";
    case RemovalReason::QUICK_REMEDY: return "QUICK_REMEDY";
  }
  return "MERGE";
}

inline RemovalReason parse_removal_reason(const std::string& s) {
  if (s == "MERGE") return RemovalReason::MERGE;
  if (s == "BOT") return RemovalReason::BOT;
  if (s == "NOISY") return RemovalReason::NOISY;
  if (s == "QUICK_REMEDY") return RemovalReason::QUICK_REMEDY;
  throw Error(Errc::malformed_document, "removal reason: " + s);
}

struct CleaningReport {
  std::vector<std::string> kept;
  std::vector<std::pair<std::string, RemovalReason>> removed;
  std::vector<std::string> flagged_tangled;
};

/// Structural merge, or the unlabeled-merge heuristic on the message.
inline bool is_merge(const CommitRecord& c) {
  return c.parent_ids.size() > 1 || c.message.rfind("Merge ", 0) == 0;
}

inline bool is_bot(const CommitRecord& c, const CleaningConfig& cfg) {
  for (const auto& suffix : cfg.bot_name_suffixes) {
    if (suffix.empty()) continue;
    if (c.author_name.size() >= suffix.size() &&
        c.author_name.compare(c.author_name.size() - suffix.size(),
                              suffix.size(), suffix) == 0)
      return true;
  }
  return cfg.bot_name_list.count(c.author_name) > 0;
}

inline bool is_noisy(const CommitRecord& c, const CleaningConfig& cfg) {
  const std::string lower = to_lower(c.message);
  for (const auto& pattern : cfg.noisy_patterns)
    if (!pattern.empty() && lower.find(pattern) != std::string::npos)
      return true;
  return false;
}

/// True when the commit is the same author's follow-up within the
/// remedy window and touches only paths its predecessor touched.
inline bool is_quick_remedy(const CommitRecord& c,
                            const CommitRecord* predecessor,
                            const CleaningConfig& cfg) {
  if (!predecessor) return false;
  if (author_key(c) != author_key(*predecessor)) return false;
  std::int64_t delta = c.authored_at - predecessor->authored_at;
  if (delta < 0 || delta > cfg.quick_remedy_window_s) return false;
  std::set<std::string> prior;
  for (const auto& m : predecessor->modifications) prior.insert(m.path);
  for (const auto& m : c.modifications)
    if (!prior.count(m.path)) return false;
  return true;
}

/// Flag only; tangled commits never leave the kept set.
inline bool flag_tangled(const CommitRecord& c, const CleaningConfig& cfg) {
  std::set<std::string> dirs;
  for (const auto& m : c.modifications) dirs.insert(dir_name(m.path));
  if (static_cast<std::int64_t>(dirs.size()) > cfg.tangled_dir_threshold)
    return true;
  auto refs = extract_issue_refs(c.message);
  return static_cast<std::int64_t>(refs.size()) >=
         cfg.tangled_issue_refs_threshold;
}

/// Sequentially filters a chronological commit list. Removal reasons
/// apply in fixed precedence MERGE > BOT > NOISY > QUICK_REMEDY; the
/// quick-remedy predecessor is the author's most recent *kept* commit,
/// which makes the whole pass idempotent.
inline std::pair<std::vector<CommitRecord>, CleaningReport> clean(
    const std::vector<CommitRecord>& commits, const CleaningConfig& cfg) {
  std::vector<CommitRecord> kept;
  CleaningReport report;
  std::map<std::string, size_t> last_kept_by_author;

  for (const auto& c : commits) {
    if (cfg.exclude_merges && is_merge(c)) {
      report.removed.emplace_back(c.id, RemovalReason::MERGE);
      continue;
    }
    if (is_bot(c, cfg)) {
      report.removed.emplace_back(c.id, RemovalReason::BOT);
      continue;
    }
    if (is_noisy(c, cfg)) {
      report.removed.emplace_back(c.id, RemovalReason::NOISY);
      continue;
    }
    if (cfg.exclude_quick_remedy) {
      auto it = last_kept_by_author.find(author_key(c));
      const CommitRecord* pred =
          it == last_kept_by_author.end() ? nullptr : &kept[it->second];
      if (is_quick_remedy(c, pred, cfg)) {
        report.removed.emplace_back(c.id, RemovalReason::QUICK_REMEDY);
        continue;
      }
    }
    if (flag_tangled(c, cfg)) report.flagged_tangled.push_back(c.id);
    report.kept.push_back(c.id);
    kept.push_back(c);
    last_kept_by_author[author_key(c)] = kept.size() - 1;
  }
  return {std::move(kept), std::move(report)};
}

// ---------------------------------------------------------------------------
// Report serialization (reason strings are part of the wire format)
// ---------------------------------------------------------------------------

inline nlohmann::json cleaning_report_to_json(const CleaningReport& r) {
  nlohmann::json j;
  j["kept"] = r.kept;
  j["removed"] = nlohmann::json::array();
  for (const auto& [id, reason] : r.removed)
    j["removed"].push_back(
        {{"commit_id", id}, {"reason", removal_reason_name(reason)}});
  j["flagged_tangled"] = r.flagged_tangled;
  return j;
}

inline CleaningReport cleaning_report_from_json(const nlohmann::json& j) {
  CleaningReport r;
  for (const auto& id : j.value("kept", nlohmann::json::array()))
    r.kept.push_back(id.get<std::string>());
  for (const auto& e : j.value("removed", nlohmann::json::array()))
    r.removed.emplace_back(e.at("commit_id").get<std::string>(),
                           parse_removal_reason(e.at("reason").get<std::string>()));
  for (const auto& id : j.value("flagged_tangled", nlohmann::json::array()))
    r.flagged_tangled.push_back(id.get<std::string>());
  return r;
}

}  // namespace msr

#endif  // MSR_CLEAN_HPP
