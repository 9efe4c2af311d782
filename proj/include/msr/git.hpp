#ifndef MSR_GIT_HPP
#define MSR_GIT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "msr/common.hpp"
#include "msr/subprocess.hpp"

namespace msr {

enum class ChangeKind { added, modified, deleted, renamed };

inline const char* change_kind_name(ChangeKind k) {
  switch (k) {
    case ChangeKind::added: return "added";
    case ChangeKind::modified: return "modified";
    case ChangeKind::deleted: return "deleted";
    case ChangeKind::renamed: return "renamed";
  }
  return "modified";
}

inline ChangeKind parse_change_kind(const std::string& s) {
  if (s == "added") return ChangeKind::added;
  if (s == "modified") return ChangeKind::modified;
  if (s == "deleted") return ChangeKind::deleted;
  if (s == "renamed") return ChangeKind::renamed;
  throw Error(Errc::malformed_document, "change_kind: " + s);
}

struct FileModification {
  std::string path;
  ChangeKind change_kind = ChangeKind::modified;
  std::int64_t lines_added = 0;
  std::int64_t lines_deleted = 0;
  bool is_binary = false;

  bool operator==(const FileModification&) const = default;
};

struct CommitRecord {
  std::string id;
  std::vector<std::string> parent_ids;
  std::string author_name;
  std::string author_email;
  std::int64_t authored_at = 0;  // UTC seconds
  std::string message;
  std::vector<FileModification> modifications;

  bool is_merge() const { return parent_ids.size() > 1; }

  bool operator==(const CommitRecord&) const = default;
};

/// Author identity used by cleaning and history metrics; the email,
/// with the display name as fallback.
inline std::string author_key(const CommitRecord& c) {
  return c.author_email.empty() ? c.author_name : c.author_email;
}

struct BlameResult {
  std::string file;
  // 1-based line number in the file as it exists at the queried commit
  // -> id of the commit that last modified that line.
  std::map<std::int64_t, std::string> assignments;
};

struct DeletedLine {
  std::int64_t line = 0;  // line number in the first parent's version
  std::string text;
};

/// Version-control access contract. One instance serves one repository
/// and must not be shared across threads; returned values are plain
/// data and may travel freely.
class VersionControl {
 public:
  virtual ~VersionControl() = default;

  virtual std::vector<CommitRecord> enumerate_commits(
      std::optional<std::int64_t> since = std::nullopt,
      std::optional<std::int64_t> until = std::nullopt) = 0;
  virtual std::vector<FileModification> extract_modifications(
      const std::string& commit_id) = 0;
  virtual BlameResult blame_at(const std::string& commit_id,
                               const std::string& file,
                               const std::set<std::int64_t>& lines) = 0;
  virtual std::int64_t loc_before(const std::string& commit_id,
                                  const std::string& file) = 0;
  /// Pre-image line numbers (and contents) removed by the commit's
  /// first-parent diff of one file.
  virtual std::vector<DeletedLine> deleted_lines(const std::string& commit_id,
                                                 const std::string& file) = 0;
  /// The commit itself plus every ancestor, newest first.
  virtual std::vector<std::string> ancestors(const std::string& commit_id) = 0;
  virtual std::int64_t authored_at(const std::string& commit_id) = 0;
};

/// Reference adapter: shells out to the `git` executable and parses
/// porcelain output. Rename detection is disabled throughout, so
/// renames surface as delete+add; merge diffs are taken against the
/// first parent.
class GitCli : public VersionControl {
 public:
  explicit GitCli(std::string repo_path) : repo_(std::move(repo_path)) {
    auto res = run(std::vector<std::string>{"rev-parse", "--git-dir"});
    if (res.exit_code != 0)
      throw Error(Errc::not_a_repository, repo_ + ": " + trim(res.err));
  }

  const std::string& repo_path() const { return repo_; }

  std::vector<CommitRecord> enumerate_commits(
      std::optional<std::int64_t> since = std::nullopt,
      std::optional<std::int64_t> until = std::nullopt) override {
    if (since && until && *since > *until) return {};

    // \x01 opens a commit, \x02 separates fields, \x03 closes the
    // message; raw %B bytes land in between.
    auto res = run({"log", "--date=unix",
                    "--pretty=format:%x01%H%x02%P%x02%an%x02%ae%x02%at%x02%B%x03"});
    if (res.exit_code != 0) {
      if (res.err.find("does not have any commits") != std::string::npos ||
          res.err.find("bad default revision") != std::string::npos)
        throw Error(Errc::empty_repository, repo_);
      throw Error(Errc::git_failure, trim(res.err));
    }

    std::vector<CommitRecord> commits;
    size_t pos = 0;
    while ((pos = res.out.find('\x01', pos)) != std::string::npos) {
      ++pos;
      size_t end = res.out.find('\x03', pos);
      if (end == std::string::npos) break;
      std::string chunk = res.out.substr(pos, end - pos);
      pos = end + 1;

      std::vector<std::string> fields;
      size_t start = 0;
      for (int i = 0; i < 5; ++i) {
        size_t sep = chunk.find('\x02', start);
        fields.push_back(chunk.substr(start, sep - start));
        start = sep + 1;
      }
      CommitRecord c;
      c.id = fields[0];
      {
        std::istringstream ps(fields[1]);
        std::string p;
        while (ps >> p) c.parent_ids.push_back(p);
      }
      c.author_name = utf8_lossy(fields[2]);
      c.author_email = utf8_lossy(fields[3]);
      c.authored_at = std::stoll(fields[4]);
      c.message = utf8_lossy(chunk.substr(start));
      if (since && c.authored_at < *since) continue;
      if (until && c.authored_at > *until) continue;
      commits.push_back(std::move(c));
    }

    for (auto& c : commits) {
      std::string parent = c.parent_ids.empty() ? "" : c.parent_ids.front();
      c.modifications = diff_against(parent, c.id);
    }
    std::sort(commits.begin(), commits.end(),
              [](const CommitRecord& a, const CommitRecord& b) {
                if (a.authored_at != b.authored_at)
                  return a.authored_at > b.authored_at;
                return a.id < b.id;
              });
    return commits;
  }

  std::vector<FileModification> extract_modifications(
      const std::string& commit_id) override {
    return diff_against(first_parent(commit_id), commit_id);
  }

  BlameResult blame_at(const std::string& commit_id, const std::string& file,
                       const std::set<std::int64_t>& lines) override {
    BlameResult result;
    result.file = file;
    if (lines.empty()) return result;

    auto res = run({"blame", "--porcelain", commit_id, "--", file});
    if (res.exit_code != 0) {
      if (res.err.find("no such path") != std::string::npos)
        throw Error(Errc::file_absent, file + " at " + commit_id);
      throw Error(Errc::git_failure, trim(res.err));
    }

    std::map<std::int64_t, std::string> full;
    std::istringstream in(res.out);
    std::string line;
    std::string current_sha;
    std::int64_t current_final = 0;
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] == '\t') continue;  // content line
      if (line.size() > 41 && line[40] == ' ' && is_hex40(line.substr(0, 40))) {
        std::istringstream hs(line);
        std::string sha;
        std::int64_t orig = 0, final_ln = 0;
        hs >> sha >> orig >> final_ln;
        if (hs) {
          current_sha = sha;
          current_final = final_ln;
          full[current_final] = current_sha;
        }
      }
    }
    std::int64_t max_line = full.empty() ? 0 : full.rbegin()->first;
    for (std::int64_t ln : lines) {
      auto it = full.find(ln);
      if (it == full.end()) {
        if (ln < 1 || ln > max_line)
          throw Error(Errc::line_out_of_range,
                      file + ":" + std::to_string(ln) + " (file has " +
                          std::to_string(max_line) + " lines)");
        continue;
      }
      result.assignments[ln] = it->second;
    }
    return result;
  }

  std::int64_t loc_before(const std::string& commit_id,
                          const std::string& file) override {
    std::string parent = first_parent(commit_id);
    if (parent.empty()) return 0;
    auto res = run({"cat-file", "blob", parent + ":" + file});
    if (res.exit_code != 0) return 0;  // absent in the parent tree
    return count_lines(res.out);
  }

  std::vector<DeletedLine> deleted_lines(const std::string& commit_id,
                                         const std::string& file) override {
    std::string parent = first_parent(commit_id);
    if (parent.empty()) return {};
    auto res = run({"diff-tree", "-p", "--no-renames", parent, commit_id,
                    "--", file});
    if (res.exit_code != 0) throw Error(Errc::git_failure, trim(res.err));

    std::vector<DeletedLine> out;
    std::istringstream in(res.out);
    std::string line;
    std::int64_t old_ln = 0;
    bool in_hunk = false;
    while (std::getline(in, line)) {
      if (line.rfind("@@ -", 0) == 0) {
        size_t comma = line.find_first_of(", ", 4);
        old_ln = std::stoll(line.substr(4, comma - 4));
        in_hunk = true;
        continue;
      }
      if (!in_hunk || line.empty()) continue;
      switch (line[0]) {
        case '-':
          if (line.rfind("---", 0) != 0) {
            out.push_back({old_ln, line.substr(1)});
            ++old_ln;
          }
          break;
        case ' ':
          ++old_ln;
          break;
        default:
          break;  // '+', '\\ No newline', headers
      }
    }
    return out;
  }

  std::vector<std::string> ancestors(const std::string& commit_id) override {
    auto res = run({"rev-list", commit_id});
    if (res.exit_code != 0) throw Error(Errc::unknown_commit, commit_id);
    std::vector<std::string> out;
    std::istringstream in(res.out);
    std::string id;
    while (std::getline(in, id))
      if (!id.empty()) out.push_back(id);
    return out;
  }

  std::int64_t authored_at(const std::string& commit_id) override {
    auto res = run({"log", "-1", "--pretty=%at", commit_id, "--"});
    if (res.exit_code != 0) throw Error(Errc::unknown_commit, commit_id);
    return std::stoll(trim(res.out));
  }

 private:
  static bool is_hex40(std::string_view s) {
    if (s.size() != 40) return false;
    for (char c : s)
      if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
  }

  static std::int64_t count_lines(const std::string& blob) {
    if (blob.empty()) return 0;
    std::int64_t n = 0;
    for (char c : blob)
      if (c == '\n') ++n;
    if (blob.back() != '\n') ++n;
    return n;
  }

  ProcessResult run(const std::vector<std::string>& args) const {
    std::vector<std::string> argv = {"git", "-C", repo_,
                                     "-c", "core.quotePath=false"};
    argv.insert(argv.end(), args.begin(), args.end());
    return run_process(argv, {{"LC_ALL", "C"}});
  }

  std::string first_parent(const std::string& commit_id) const {
    auto res = run({"log", "-1", "--pretty=%P", commit_id, "--"});
    if (res.exit_code != 0) throw Error(Errc::unknown_commit, commit_id);
    std::istringstream ps(res.out);
    std::string p;
    ps >> p;
    return p;
  }

  std::vector<FileModification> diff_against(const std::string& parent,
                                             const std::string& commit_id) {
    std::vector<std::string> args = {"diff-tree", "-r", "--no-renames",
                                     "--raw", "--numstat"};
    if (parent.empty()) {
      args.push_back("--root");
      args.push_back(commit_id);
    } else {
      args.push_back(parent);
      args.push_back(commit_id);
    }
    auto res = run(args);
    if (res.exit_code != 0) throw Error(Errc::unknown_commit, commit_id);

    std::map<std::string, FileModification> by_path;
    std::vector<std::string> order;
    std::istringstream in(res.out);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line[0] == ':') {
        // :oldmode newmode oldsha newsha S\tpath
        size_t tab = line.find('\t');
        if (tab == std::string::npos) continue;
        std::string path = line.substr(tab + 1);
        char status = line[tab - 1];
        // multi-char statuses (e.g. R100) keep their leading letter
        size_t sp = line.rfind(' ', tab);
        if (sp != std::string::npos && sp + 1 < tab) status = line[sp + 1];
        FileModification m;
        m.path = utf8_lossy(path);
        switch (status) {
          case 'A': m.change_kind = ChangeKind::added; break;
          case 'D': m.change_kind = ChangeKind::deleted; break;
          case 'R': m.change_kind = ChangeKind::renamed; break;
          default: m.change_kind = ChangeKind::modified; break;
        }
        if (!by_path.count(m.path)) order.push_back(m.path);
        by_path[m.path] = m;
      } else if (is_hex40(line)) {
        continue;  // diff-tree echoes the commit id in --root mode
      } else {
        size_t t1 = line.find('\t');
        size_t t2 = line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos) continue;
        std::string added = line.substr(0, t1);
        std::string deleted = line.substr(t1 + 1, t2 - t1 - 1);
        std::string path = utf8_lossy(line.substr(t2 + 1));
        auto it = by_path.find(path);
        if (it == by_path.end()) {
          if (!by_path.count(path)) order.push_back(path);
          it = by_path.emplace(path, FileModification{path}).first;
        }
        if (added == "-" || deleted == "-") {
          it->second.is_binary = true;
          it->second.lines_added = 0;
          it->second.lines_deleted = 0;
        } else {
          it->second.lines_added = std::stoll(added);
          it->second.lines_deleted = std::stoll(deleted);
        }
      }
    }
    std::vector<FileModification> mods;
    mods.reserve(order.size());
    for (const auto& p : order) mods.push_back(by_path[p]);
    return mods;
  }

  std::string repo_;
};

// ---------------------------------------------------------------------------
// JSON-lines hand-off
// ---------------------------------------------------------------------------

inline nlohmann::json commit_to_json(const CommitRecord& c) {
  nlohmann::json j;
  j["id"] = c.id;
  j["parent_ids"] = c.parent_ids;
  j["author_name"] = c.author_name;
  j["author_email"] = c.author_email;
  j["authored_at"] = c.authored_at;
  j["message"] = c.message;
  j["modifications"] = nlohmann::json::array();
  for (const auto& m : c.modifications)
    j["modifications"].push_back({{"path", m.path},
                                  {"change_kind", change_kind_name(m.change_kind)},
                                  {"lines_added", m.lines_added},
                                  {"lines_deleted", m.lines_deleted},
                                  {"is_binary", m.is_binary}});
  return j;
}

inline CommitRecord commit_from_json(const nlohmann::json& j) {
  CommitRecord c;
  try {
    c.id = j.at("id").get<std::string>();
    for (const auto& p : j.value("parent_ids", nlohmann::json::array()))
      c.parent_ids.push_back(p.get<std::string>());
    c.author_name = j.value("author_name", std::string());
    c.author_email = j.value("author_email", std::string());
    c.authored_at = j.value("authored_at", std::int64_t(0));
    c.message = j.value("message", std::string());
    for (const auto& jm : j.value("modifications", nlohmann::json::array())) {
      FileModification m;
      m.path = jm.at("path").get<std::string>();
      m.change_kind = parse_change_kind(jm.at("change_kind").get<std::string>());
      m.lines_added = jm.value("lines_added", std::int64_t(0));
      m.lines_deleted = jm.value("lines_deleted", std::int64_t(0));
      m.is_binary = jm.value("is_binary", false);
      c.modifications.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_document, e.what());
  }
  return c;
}

inline void write_commits_jsonl(const std::string& path,
                                const std::vector<CommitRecord>& commits) {
  std::string out;
  for (const auto& c : commits) out += commit_to_json(c).dump() + "\n";
  write_file(path, out);
}

inline std::vector<CommitRecord> read_commits_jsonl(const std::string& path) {
  std::vector<CommitRecord> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      out.push_back(commit_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::malformed_document, e.what());
    }
  }
  return out;
}

}  // namespace msr

#endif  // MSR_GIT_HPP
