#ifndef MSR_COMMON_HPP
#define MSR_COMMON_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace msr {

inline constexpr const char* kToolVersion = "0.1.0";

/// Stable error identities surfaced by every module. CLI maps all of
/// these to the data-error exit code.
enum class Errc {
  malformed_document,
  missing_goal_field,
  duplicate_question_id,
  duplicate_metric_id,
  unknown_metric_ref,
  empty_goal_field,
  duplicate_repo_id,
  bad_criteria,
  unknown_field,
  out_of_range,
  not_a_repository,
  empty_repository,
  unknown_commit,
  file_absent,
  line_out_of_range,
  git_failure,
  no_modifications,
  unsorted_input,
  empty_corpus,
  unknown_document,
  empty_sample,
  insufficient_sample,
  zero_variance,
  io_error,
  digest_mismatch,
  missing_artifact,
  bad_config,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::malformed_document: return "MALFORMED_DOCUMENT";
    case Errc::missing_goal_field: return "MISSING_GOAL_FIELD";
    case Errc::duplicate_question_id: return "DUPLICATE_QUESTION_ID";
    case Errc::duplicate_metric_id: return "DUPLICATE_METRIC_ID";
    case Errc::unknown_metric_ref: return "UNKNOWN_METRIC_REF";
    case Errc::empty_goal_field: return "EMPTY_GOAL_FIELD";
    case Errc::duplicate_repo_id: return "DUPLICATE_REPO_ID";
    case Errc::bad_criteria: return "BAD_CRITERIA";
    case Errc::unknown_field: return "UNKNOWN_FIELD";
    case Errc::out_of_range: return "OUT_OF_RANGE";
    case Errc::not_a_repository: return "NOT_A_REPOSITORY";
    case Errc::empty_repository: return "EMPTY_REPOSITORY";
    case Errc::unknown_commit: return "UNKNOWN_COMMIT";
    case Errc::file_absent: return "FILE_ABSENT";
    case Errc::line_out_of_range: return "LINE_OUT_OF_RANGE";
    case Errc::git_failure: return "GIT_FAILURE";
    case Errc::no_modifications: return "NO_MODIFICATIONS";
    case Errc::unsorted_input: return "UNSORTED_INPUT";
    case Errc::empty_corpus: return "EMPTY_CORPUS";
    case Errc::unknown_document: return "UNKNOWN_DOCUMENT";
    case Errc::empty_sample: return "EMPTY_SAMPLE";
    case Errc::insufficient_sample: return "INSUFFICIENT_SAMPLE";
    case Errc::zero_variance: return "ZERO_VARIANCE";
    case Errc::io_error: return "IO_ERROR";
    case Errc::digest_mismatch: return "DIGEST_MISMATCH";
    case Errc::missing_artifact: return "MISSING_ARTIFACT";
    case Errc::bad_config: return "BAD_CONFIG";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

// ---------------------------------------------------------------------------
// Small string helpers used across modules.
// ---------------------------------------------------------------------------

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

inline bool is_ascii_alnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

/// Replaces ill-formed UTF-8 sequences with U+FFFD so downstream JSON
/// serialization never sees invalid bytes.
inline std::string utf8_lossy(std::string_view in) {
  static const char kRepl[] = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(in.size());
  size_t i = 0;
  while (i < in.size()) {
    unsigned char c = static_cast<unsigned char>(in[i]);
    size_t len = 0;
    if (c < 0x80) len = 1;
    else if ((c & 0xE0) == 0xC0 && c >= 0xC2) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0 && c <= 0xF4) len = 4;
    if (len == 0 || i + len > in.size()) {
      out += kRepl;
      ++i;
      continue;
    }
    bool ok = true;
    for (size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(in[i + k]) & 0xC0) != 0x80) ok = false;
    }
    if (ok) {
      out.append(in.substr(i, len));
      i += len;
    } else {
      out += kRepl;
      ++i;
    }
  }
  return out;
}

/// Fixed 6-decimal rendering; every emitted artifact uses this form.
inline std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// File IO
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view data) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(Errc::io_error, "short write to " + path);
}

// ---------------------------------------------------------------------------
// Source-file classification (extension allowlist)
// ---------------------------------------------------------------------------

inline const std::set<std::string>& default_source_extensions() {
  static const std::set<std::string> exts = {
      ".c",   ".cc",  ".cpp", ".cxx", ".h",    ".hh",  ".hpp",   ".hxx",
      ".java", ".py",  ".js",  ".jsx", ".ts",   ".tsx", ".go",    ".rs",
      ".rb",  ".cs",  ".kt",  ".kts", ".m",    ".mm",  ".scala", ".swift",
      ".php", ".pl",  ".sh",  ".sql", ".groovy"};
  return exts;
}

inline bool is_source_file(std::string_view path,
                           const std::set<std::string>& extensions) {
  size_t slash = path.find_last_of('/');
  std::string_view name =
      slash == std::string_view::npos ? path : path.substr(slash + 1);
  size_t dot = name.find_last_of('.');
  if (dot == std::string_view::npos) return false;
  return extensions.count(to_lower(name.substr(dot))) > 0;
}

/// Directory part of a repo-relative path; "" for files at the root.
inline std::string dir_name(std::string_view path) {
  size_t slash = path.find_last_of('/');
  return slash == std::string_view::npos ? std::string()
                                         : std::string(path.substr(0, slash));
}

/// First path segment; files at the repository root form subsystem "".
inline std::string subsystem_of(std::string_view path) {
  size_t slash = path.find('/');
  return slash == std::string_view::npos ? std::string()
                                         : std::string(path.substr(0, slash));
}

}  // namespace msr

#endif  // MSR_COMMON_HPP
