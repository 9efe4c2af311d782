#ifndef MSR_METRICS_HPP
#define MSR_METRICS_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "msr/common.hpp"
#include "msr/git.hpp"

namespace msr {

inline constexpr double kSecondsPerYear = 31557600.0;  // 365.25 days
inline constexpr double kSecondsPerDay = 86400.0;

/// The 14 commit-level metrics across diffusion (ns, nd, nf, entropy),
/// size (la, ld, lt), purpose (fix), history (ndev, age, nuc) and
/// experience (exp, rexp, sexp).
struct ChangeMetrics {
  std::string commit_id;
  std::int64_t ns = 0;
  std::int64_t nd = 0;
  std::int64_t nf = 0;
  double entropy = 0.0;
  std::int64_t la = 0;
  std::int64_t ld = 0;
  double lt = 0.0;
  bool fix = false;
  std::int64_t ndev = 0;
  double age = 0.0;
  std::int64_t nuc = 0;
  std::int64_t exp = 0;
  double rexp = 0.0;
  std::int64_t sexp = 0;

  bool operator==(const ChangeMetrics&) const = default;
};

/// Normalized Shannon entropy of per-file churn. 0 for a single file or
/// an empty change; exactly 1 when k >= 2 files changed equally.
inline double compute_entropy(const std::vector<std::int64_t>& counts) {
  const size_t nf = counts.size();
  if (nf <= 1) return 0.0;
  std::int64_t total = 0;
  std::int64_t nonzero = 0;
  std::int64_t first_nonzero = 0;
  bool all_equal = true;
  for (std::int64_t c : counts) {
    if (c < 0) throw Error(Errc::out_of_range, "negative line count");
    total += c;
    if (c > 0) {
      if (nonzero == 0) first_nonzero = c;
      else if (c != first_nonzero) all_equal = false;
      ++nonzero;
    }
  }
  if (total == 0) return 0.0;
  const double h_max = std::log2(static_cast<double>(std::max<size_t>(nf, 2)));
  if (all_equal)  // H reduces to log2(m) for m equal shares
    return std::log2(static_cast<double>(nonzero)) / h_max;
  double h = 0.0;
  for (std::int64_t c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h / h_max;
}

/// Rolling view of the history strictly before the commit under
/// evaluation. Fold order must be chronological.
struct HistoryIndex {
  struct FileHistory {
    std::int64_t last_change_at = 0;
    std::set<std::string> authors;
    std::set<std::string> commits;
  };
  struct AuthorHistory {
    std::int64_t commit_count = 0;
    std::vector<std::int64_t> commit_times;
    std::map<std::string, std::int64_t> subsystem_counts;
  };

  std::map<std::string, FileHistory> files;
  std::map<std::string, AuthorHistory> authors;
  std::int64_t folded = 0;
  std::int64_t last_folded_at = 0;
  std::string last_folded_id;

  void fold(const CommitRecord& c) {
    if (folded > 0 && (c.authored_at < last_folded_at ||
                       (c.authored_at == last_folded_at && c.id < last_folded_id)))
      throw Error(Errc::unsorted_input,
                  "commit " + c.id + " folded out of order");
    const std::string author = author_key(c);
    std::set<std::string> subsystems;
    for (const auto& m : c.modifications) {
      auto& f = files[m.path];
      f.last_change_at = c.authored_at;
      f.authors.insert(author);
      f.commits.insert(c.id);
      subsystems.insert(subsystem_of(m.path));
    }
    auto& a = authors[author];
    a.commit_count += 1;
    a.commit_times.push_back(c.authored_at);
    for (const auto& s : subsystems) a.subsystem_counts[s] += 1;
    ++folded;
    last_folded_at = c.authored_at;
    last_folded_id = c.id;
  }
};

inline HistoryIndex build_history_index(const std::vector<CommitRecord>& chronological) {
  HistoryIndex index;
  for (const auto& c : chronological) index.fold(c);
  return index;
}

/// Evaluates the 14 metrics for one commit against an index reflecting
/// all and only the commits before it.
inline ChangeMetrics compute_metrics(const CommitRecord& commit, bool fix,
                                     const HistoryIndex& index,
                                     VersionControl& vcs,
                                     const std::set<std::string>& source_extensions) {
  if (commit.modifications.empty())
    throw Error(Errc::no_modifications, commit.id);

  ChangeMetrics m;
  m.commit_id = commit.id;
  m.fix = fix;
  m.nf = static_cast<std::int64_t>(commit.modifications.size());

  std::set<std::string> subsystems;
  std::set<std::string> dirs;
  std::vector<std::int64_t> churn_per_file;
  std::int64_t loc_sum = 0;
  std::set<std::string> prior_authors;
  std::set<std::string> prior_commits;
  double age_sum = 0.0;
  std::int64_t aged_files = 0;

  for (const auto& mod : commit.modifications) {
    subsystems.insert(subsystem_of(mod.path));
    dirs.insert(dir_name(mod.path));
    churn_per_file.push_back(mod.lines_added + mod.lines_deleted);
    if (is_source_file(mod.path, source_extensions)) {
      m.la += mod.lines_added;
      m.ld += mod.lines_deleted;
    }
    loc_sum += vcs.loc_before(commit.id, mod.path);
    auto it = index.files.find(mod.path);
    if (it != index.files.end()) {
      prior_authors.insert(it->second.authors.begin(), it->second.authors.end());
      prior_commits.insert(it->second.commits.begin(), it->second.commits.end());
      age_sum += static_cast<double>(commit.authored_at - it->second.last_change_at) /
                 kSecondsPerDay;
      ++aged_files;
    }
  }

  m.ns = static_cast<std::int64_t>(subsystems.size());
  m.nd = static_cast<std::int64_t>(dirs.size());
  m.entropy = compute_entropy(churn_per_file);
  m.lt = static_cast<double>(loc_sum) / static_cast<double>(m.nf);
  m.ndev = static_cast<std::int64_t>(prior_authors.size());
  m.nuc = static_cast<std::int64_t>(prior_commits.size());
  m.age = aged_files > 0 ? age_sum / static_cast<double>(aged_files) : 0.0;

  auto it = index.authors.find(author_key(commit));
  if (it != index.authors.end()) {
    const auto& a = it->second;
    m.exp = a.commit_count;
    for (std::int64_t t : a.commit_times) {
      double years = static_cast<double>(commit.authored_at - t) / kSecondsPerYear;
      m.rexp += 1.0 / (years + 1.0);
    }
    for (const auto& s : subsystems) {
      auto sit = a.subsystem_counts.find(s);
      if (sit != a.subsystem_counts.end()) m.sexp += sit->second;
    }
  }
  return m;
}

}  // namespace msr

#endif  // MSR_METRICS_HPP
