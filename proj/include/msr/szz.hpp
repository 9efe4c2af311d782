#ifndef MSR_SZZ_HPP
#define MSR_SZZ_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "msr/common.hpp"
#include "msr/git.hpp"

namespace msr {

struct SzzConfig {
  enum class Span { file, all };

  std::set<std::string> source_extensions = default_source_extensions();
  /// Skip whitespace/comment-only fixed lines before picking the oldest
  /// blamed commit. Off by default.
  bool cosmetic_filter = false;
  /// file: a commit must touch the fixed file to be labeled.
  /// all: every in-span commit on the fixing history is labeled.
  Span span = Span::file;
};

inline const char* szz_span_name(SzzConfig::Span s) {
  return s == SzzConfig::Span::file ? "file" : "all";
}

struct DefectLink {
  std::string fixing_commit;
  std::string fixed_file;
  std::string inducing_commit;
  std::set<std::int64_t> blamed_lines;  // pre-image lines the inducing commit wrote

  std::string link_id() const { return fixing_commit + ":" + fixed_file; }

  bool operator==(const DefectLink&) const = default;
};

struct LabeledCommit {
  std::string commit_id;
  bool failure_prone = false;
  std::vector<std::string> provenance;  // link ids justifying the label
};

/// Source files a fix modified (pure additions have no pre-image to
/// blame; binaries have no lines).
inline std::vector<std::string> identify_fixed_files(
    const CommitRecord& fixing, const std::set<std::string>& source_extensions) {
  std::vector<std::string> out;
  for (const auto& m : fixing.modifications) {
    if (m.change_kind != ChangeKind::modified) continue;
    if (m.is_binary) continue;
    if (!is_source_file(m.path, source_extensions)) continue;
    out.push_back(m.path);
  }
  return out;
}

namespace detail {

inline bool is_cosmetic_line(const std::string& text) {
  std::string t = trim(text);
  if (t.empty()) return true;
  if (t.rfind("//", 0) == 0 || t.rfind("/*", 0) == 0 || t.rfind("*", 0) == 0 ||
      t.rfind("#", 0) == 0)
    return true;
  return false;
}

}  // namespace detail

/// Blames the lines the fix deleted or changed, evaluated at the fix's
/// first parent, and picks the oldest blamed commit (ties broken by
/// lexicographic id). Absent when the fix only added lines.
inline std::optional<DefectLink> locate_inducing(const CommitRecord& fixing,
                                                 const std::string& file,
                                                 VersionControl& vcs,
                                                 const SzzConfig& cfg = {}) {
  if (fixing.parent_ids.empty()) return std::nullopt;

  std::vector<DeletedLine> removed = vcs.deleted_lines(fixing.id, file);
  if (cfg.cosmetic_filter) {
    removed.erase(std::remove_if(removed.begin(), removed.end(),
                                 [](const DeletedLine& d) {
                                   return detail::is_cosmetic_line(d.text);
                                 }),
                  removed.end());
  }
  if (removed.empty()) return std::nullopt;

  std::set<std::int64_t> lines;
  for (const auto& d : removed) lines.insert(d.line);

  BlameResult blame = vcs.blame_at(fixing.parent_ids.front(), file, lines);
  if (blame.assignments.empty()) return std::nullopt;

  std::map<std::string, std::set<std::int64_t>> lines_by_commit;
  for (const auto& [line, commit] : blame.assignments)
    lines_by_commit[commit].insert(line);

  std::string oldest_id;
  std::int64_t oldest_at = 0;
  for (const auto& [commit, _] : lines_by_commit) {
    std::int64_t at = vcs.authored_at(commit);
    if (oldest_id.empty() || at < oldest_at ||
        (at == oldest_at && commit < oldest_id)) {
      oldest_id = commit;
      oldest_at = at;
    }
  }

  DefectLink link;
  link.fixing_commit = fixing.id;
  link.fixed_file = file;
  link.inducing_commit = oldest_id;
  link.blamed_lines = lines_by_commit[oldest_id];
  return link;
}

/// Labels the failure-prone span of each link: commits authored in
/// [inducing, fixing), on the fixing commit's ancestry (computed from
/// the provided records' parent pointers), and - in file span mode -
/// touching the fixed file. The inducing commit is always labeled; a
/// fixing commit is never labeled by its own link.
inline std::vector<LabeledCommit> label_failure_prone(
    const std::vector<DefectLink>& links,
    const std::vector<CommitRecord>& commits,
    SzzConfig::Span span = SzzConfig::Span::file) {
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < commits.size(); ++i) index[commits[i].id] = i;

  auto ancestor_set = [&](const std::string& tip) {
    std::set<std::string> seen;
    std::vector<std::string> stack{tip};
    while (!stack.empty()) {
      std::string id = stack.back();
      stack.pop_back();
      if (!seen.insert(id).second) continue;
      auto it = index.find(id);
      if (it == index.end()) continue;  // parent outside the mined range
      for (const auto& p : commits[it->second].parent_ids) stack.push_back(p);
    }
    return seen;
  };

  std::vector<std::set<std::string>> provenance(commits.size());
  for (const auto& link : links) {
    auto fix_it = index.find(link.fixing_commit);
    if (fix_it == index.end())
      throw Error(Errc::unknown_commit, link.fixing_commit);
    const CommitRecord& fixing = commits[fix_it->second];
    auto ind_it = index.find(link.inducing_commit);
    std::int64_t inducing_at = ind_it != index.end()
                                   ? commits[ind_it->second].authored_at
                                   : 0;
    std::set<std::string> ancestors = ancestor_set(fixing.id);

    for (size_t i = 0; i < commits.size(); ++i) {
      const CommitRecord& c = commits[i];
      if (c.id == fixing.id) continue;
      if (!ancestors.count(c.id)) continue;
      if (c.authored_at < inducing_at || c.authored_at >= fixing.authored_at)
        continue;
      if (span == SzzConfig::Span::file) {
        bool touches = c.id == link.inducing_commit;
        for (const auto& m : c.modifications)
          if (m.path == link.fixed_file) touches = true;
        if (!touches) continue;
      }
      provenance[i].insert(link.link_id());
    }
    if (ind_it != index.end()) provenance[ind_it->second].insert(link.link_id());
  }

  std::vector<LabeledCommit> out;
  out.reserve(commits.size());
  for (size_t i = 0; i < commits.size(); ++i) {
    LabeledCommit lc;
    lc.commit_id = commits[i].id;
    lc.failure_prone = !provenance[i].empty();
    lc.provenance.assign(provenance[i].begin(), provenance[i].end());
    out.push_back(std::move(lc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json link_to_json(const DefectLink& l) {
  return {{"fixing_commit", l.fixing_commit},
          {"fixed_file", l.fixed_file},
          {"inducing_commit", l.inducing_commit},
          {"blamed_lines", l.blamed_lines}};
}

inline DefectLink link_from_json(const nlohmann::json& j) {
  DefectLink l;
  try {
    l.fixing_commit = j.at("fixing_commit").get<std::string>();
    l.fixed_file = j.at("fixed_file").get<std::string>();
    l.inducing_commit = j.at("inducing_commit").get<std::string>();
    for (const auto& ln : j.value("blamed_lines", nlohmann::json::array()))
      l.blamed_lines.insert(ln.get<std::int64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_document, e.what());
  }
  return l;
}

inline nlohmann::json label_to_json(const LabeledCommit& lc) {
  return {{"commit_id", lc.commit_id},
          {"failure_prone", lc.failure_prone},
          {"provenance", lc.provenance}};
}

inline LabeledCommit label_from_json(const nlohmann::json& j) {
  LabeledCommit lc;
  try {
    lc.commit_id = j.at("commit_id").get<std::string>();
    lc.failure_prone = j.at("failure_prone").get<bool>();
    for (const auto& p : j.value("provenance", nlohmann::json::array()))
      lc.provenance.push_back(p.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_document, e.what());
  }
  return lc;
}

}  // namespace msr

#endif  // MSR_SZZ_HPP
