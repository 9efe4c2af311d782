#ifndef MSR_CATALOG_HPP
#define MSR_CATALOG_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "msr/common.hpp"

namespace msr {

enum class PurposeTag { software, experiment, website, academic, personal, unknown };

inline const char* purpose_tag_name(PurposeTag t) {
  switch (t) {
    case PurposeTag::software: return "software";
    case PurposeTag::experiment: return "experiment";
    case PurposeTag::website: return "website";
    case PurposeTag::academic: return "academic";
    case PurposeTag::personal: return "personal";
    case PurposeTag::unknown: return "unknown";
  }
  return "unknown";
}

inline PurposeTag parse_purpose_tag(const std::string& s) {
  if (s == "software") return PurposeTag::software;
  if (s == "experiment") return PurposeTag::experiment;
  if (s == "website") return PurposeTag::website;
  if (s == "academic") return PurposeTag::academic;
  if (s == "personal") return PurposeTag::personal;
  if (s == "unknown") return PurposeTag::unknown;
  throw Error(Errc::malformed_document, "purpose_tag: " + s);
}

struct RepoRecord {
  std::string id;
  std::string name;
  std::string primary_language;
  std::int64_t loc = 0;
  std::int64_t commit_count = 0;
  std::int64_t last_commit_at = 0;  // UTC seconds
  bool is_fork = false;
  bool is_mirror = false;
  std::int64_t stars = 0;
  std::int64_t contributors = 0;
  std::string domain;
  PurposeTag purpose_tag = PurposeTag::unknown;

  bool operator==(const RepoRecord&) const = default;
};

/// Inclusion/exclusion predicates. Absent optionals (and the empty
/// allowed_purposes set) impose no restriction.
struct SelectionCriteria {
  std::optional<std::set<std::string>> languages;
  std::optional<std::int64_t> min_commits;
  std::optional<std::int64_t> min_loc;
  std::optional<std::int64_t> max_loc;
  std::optional<std::int64_t> active_within_days;
  bool exclude_forks = false;
  bool exclude_mirrors = false;
  std::optional<std::int64_t> min_stars;
  std::optional<std::int64_t> min_contributors;
  std::set<PurposeTag> allowed_purposes;
  std::optional<std::set<std::string>> domains;
};

struct Rejection {
  std::string repo_id;
  std::string criterion;

  bool operator==(const Rejection&) const = default;
};

struct SelectionReport {
  std::vector<std::string> accepted;
  std::vector<Rejection> rejected;
  std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// Catalog / criteria files
// ---------------------------------------------------------------------------

inline std::vector<RepoRecord> parse_catalog(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_document, e.what());
  }
  if (!doc.is_array())
    throw Error(Errc::malformed_document, "catalog must be a JSON array");
  std::vector<RepoRecord> out;
  std::set<std::string> ids;
  for (const auto& j : doc) {
    RepoRecord r;
    try {
      r.id = j.at("id").get<std::string>();
      r.name = j.value("name", std::string());
      r.primary_language = j.value("primary_language", std::string());
      r.loc = j.value("loc", std::int64_t(0));
      r.commit_count = j.value("commit_count", std::int64_t(0));
      r.last_commit_at = j.value("last_commit_at", std::int64_t(0));
      r.is_fork = j.value("is_fork", false);
      r.is_mirror = j.value("is_mirror", false);
      r.stars = j.value("stars", std::int64_t(0));
      r.contributors = j.value("contributors", std::int64_t(0));
      r.domain = j.value("domain", std::string());
      r.purpose_tag = parse_purpose_tag(j.value("purpose_tag", std::string("unknown")));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::malformed_document, e.what());
    }
    if (r.loc < 0 || r.commit_count < 0 || r.stars < 0 || r.contributors < 0)
      throw Error(Errc::malformed_document, "negative count in record " + r.id);
    if (!ids.insert(r.id).second) throw Error(Errc::duplicate_repo_id, r.id);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<RepoRecord> load_catalog(const std::string& path) {
  return parse_catalog(read_file(path));
}

inline SelectionCriteria parse_criteria(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_document, e.what());
  }
  SelectionCriteria c;
  try {
    if (doc.contains("languages")) {
      std::set<std::string> langs;
      for (const auto& l : doc["languages"]) langs.insert(l.get<std::string>());
      c.languages = std::move(langs);
    }
    auto opt_int = [&](const char* key) -> std::optional<std::int64_t> {
      if (doc.contains(key)) return doc[key].get<std::int64_t>();
      return std::nullopt;
    };
    c.min_commits = opt_int("min_commits");
    c.min_loc = opt_int("min_loc");
    c.max_loc = opt_int("max_loc");
    c.active_within_days = opt_int("active_within_days");
    c.exclude_forks = doc.value("exclude_forks", false);
    c.exclude_mirrors = doc.value("exclude_mirrors", false);
    c.min_stars = opt_int("min_stars");
    c.min_contributors = opt_int("min_contributors");
    if (doc.contains("allowed_purposes"))
      for (const auto& p : doc["allowed_purposes"])
        c.allowed_purposes.insert(parse_purpose_tag(p.get<std::string>()));
    if (doc.contains("domains")) {
      std::set<std::string> ds;
      for (const auto& d : doc["domains"]) ds.insert(d.get<std::string>());
      c.domains = std::move(ds);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_document, e.what());
  }
  if (c.min_loc && c.max_loc && *c.min_loc > *c.max_loc)
    throw Error(Errc::bad_criteria, "min_loc > max_loc");
  return c;
}

inline SelectionCriteria load_criteria(const std::string& path) {
  return parse_criteria(read_file(path));
}

// ---------------------------------------------------------------------------
// Selection
// ---------------------------------------------------------------------------

/// Applies every present criterion; a rejected record names the first
/// failing criterion in declared field order. Star-based filtering adds
/// a validity caution to the report.
inline SelectionReport apply_criteria(const std::vector<RepoRecord>& records,
                                      const SelectionCriteria& c,
                                      std::int64_t now) {
  SelectionReport report;
  for (const auto& r : records) {
    const char* failed = nullptr;
    if (c.languages && !c.languages->count(r.primary_language))
      failed = "languages";
    else if (c.min_commits && r.commit_count < *c.min_commits)
      failed = "min_commits";
    else if (c.min_loc && r.loc < *c.min_loc)
      failed = "min_loc";
    else if (c.max_loc && r.loc > *c.max_loc)
      failed = "max_loc";
    else if (c.active_within_days &&
             r.last_commit_at < now - *c.active_within_days * 86400)
      failed = "active_within_days";
    else if (c.exclude_forks && r.is_fork)
      failed = "exclude_forks";
    else if (c.exclude_mirrors && r.is_mirror)
      failed = "exclude_mirrors";
    else if (c.min_stars && r.stars < *c.min_stars)
      failed = "min_stars";
    else if (c.min_contributors && r.contributors < *c.min_contributors)
      failed = "min_contributors";
    else if (!c.allowed_purposes.empty() &&
             !c.allowed_purposes.count(r.purpose_tag))
      failed = "allowed_purposes";
    else if (c.domains && !c.domains->count(r.domain))
      failed = "domains";

    if (failed) report.rejected.push_back({r.id, failed});
    else report.accepted.push_back(r.id);
  }
  if (c.min_stars)
    report.warnings.push_back(
        "STAR_PROXY_CAUTION: star counts are not strongly correlated with "
        "contributors, forks, commits, or age; do not rely on them alone");
  return report;
}

// ---------------------------------------------------------------------------
// Sample sizing and stratified sampling
// ---------------------------------------------------------------------------

enum class Confidence { c90, c95, c99 };

/// Cochran sample size with finite-population correction, rounded up.
inline std::int64_t compute_sample_size(std::int64_t population,
                                        Confidence confidence, double margin,
                                        double proportion) {
  if (population < 1) throw Error(Errc::out_of_range, "population < 1");
  if (!(margin > 0.0 && margin < 1.0))
    throw Error(Errc::out_of_range, "margin must be in (0,1)");
  if (!(proportion > 0.0 && proportion < 1.0))
    throw Error(Errc::out_of_range, "proportion must be in (0,1)");
  double z = 0.0;
  switch (confidence) {
    case Confidence::c90: z = 1.645; break;
    case Confidence::c95: z = 1.960; break;
    case Confidence::c99: z = 2.576; break;
  }
  double n0 = z * z * proportion * (1.0 - proportion) / (margin * margin);
  double n = n0 / (1.0 + (n0 - 1.0) / static_cast<double>(population));
  auto rounded = static_cast<std::int64_t>(std::ceil(n));
  return std::min(rounded, population);
}

namespace detail {

inline std::string repo_field_key(const RepoRecord& r,
                                  const std::string& field) {
  if (field == "id") return r.id;
  if (field == "name") return r.name;
  if (field == "primary_language") return r.primary_language;
  if (field == "loc") return std::to_string(r.loc);
  if (field == "commit_count") return std::to_string(r.commit_count);
  if (field == "last_commit_at") return std::to_string(r.last_commit_at);
  if (field == "is_fork") return r.is_fork ? "true" : "false";
  if (field == "is_mirror") return r.is_mirror ? "true" : "false";
  if (field == "stars") return std::to_string(r.stars);
  if (field == "contributors") return std::to_string(r.contributors);
  if (field == "domain") return r.domain;
  if (field == "purpose_tag") return purpose_tag_name(r.purpose_tag);
  throw Error(Errc::unknown_field, field);
}

// Engine-only Fisher-Yates; std::shuffle's draw sequence is
// implementation-defined, this one is pinned by the mt19937_64 spec.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace detail

/// Proportional (largest-remainder) allocation across strata, seeded
/// shuffle within each stratum. Same inputs and seed reproduce the
/// selection and its order exactly.
inline std::vector<RepoRecord> stratified_sample(
    const std::vector<RepoRecord>& records, const std::string& strata_key,
    size_t n, std::uint64_t seed) {
  if (n >= records.size()) return records;

  std::map<std::string, std::vector<size_t>> strata;
  for (size_t i = 0; i < records.size(); ++i)
    strata[detail::repo_field_key(records[i], strata_key)].push_back(i);

  const double total = static_cast<double>(records.size());
  struct Alloc {
    std::string key;
    size_t base;
    double remainder;
  };
  std::vector<Alloc> allocs;
  size_t assigned = 0;
  for (const auto& [key, members] : strata) {
    double quota = static_cast<double>(n) * static_cast<double>(members.size()) / total;
    size_t base = static_cast<size_t>(std::floor(quota));
    allocs.push_back({key, base, quota - static_cast<double>(base)});
    assigned += base;
  }
  std::vector<size_t> order(allocs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (allocs[a].remainder != allocs[b].remainder)
      return allocs[a].remainder > allocs[b].remainder;
    return allocs[a].key < allocs[b].key;
  });
  for (size_t k = 0; assigned < n; ++k, ++assigned)
    allocs[order[k % order.size()]].base += 1;

  std::mt19937_64 rng(seed);
  std::vector<RepoRecord> out;
  out.reserve(n);
  size_t stratum_idx = 0;
  for (const auto& [key, members] : strata) {
    std::vector<size_t> pool = members;
    detail::deterministic_shuffle(pool, rng);
    size_t take = std::min(allocs[stratum_idx].base, pool.size());
    for (size_t i = 0; i < take; ++i) out.push_back(records[pool[i]]);
    ++stratum_idx;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json selection_report_to_json(const SelectionReport& r) {
  nlohmann::json j;
  j["accepted"] = r.accepted;
  j["rejected"] = nlohmann::json::array();
  for (const auto& rej : r.rejected)
    j["rejected"].push_back({{"id", rej.repo_id}, {"criterion", rej.criterion}});
  j["warnings"] = r.warnings;
  return j;
}

inline SelectionReport selection_report_from_json(const nlohmann::json& j) {
  SelectionReport r;
  for (const auto& a : j.value("accepted", nlohmann::json::array()))
    r.accepted.push_back(a.get<std::string>());
  for (const auto& rej : j.value("rejected", nlohmann::json::array()))
    r.rejected.push_back({rej.at("id").get<std::string>(),
                          rej.at("criterion").get<std::string>()});
  for (const auto& w : j.value("warnings", nlohmann::json::array()))
    r.warnings.push_back(w.get<std::string>());
  return r;
}

}  // namespace msr

#endif  // MSR_CATALOG_HPP
