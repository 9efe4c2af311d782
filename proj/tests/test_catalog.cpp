#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "msr/catalog.hpp"
#include "oracles.hpp"

using namespace msr;

namespace {

RepoRecord repo(const std::string& id, const std::string& lang,
                std::int64_t commits, std::int64_t stars,
                PurposeTag purpose = PurposeTag::software) {
  RepoRecord r;
  r.id = id;
  r.name = id;
  r.primary_language = lang;
  r.commit_count = commits;
  r.loc = commits * 100;
  r.last_commit_at = 1700000000;
  r.stars = stars;
  r.contributors = 5;
  r.domain = "tooling";
  r.purpose_tag = purpose;
  return r;
}

constexpr std::int64_t kNow = 1700000000 + 86400;

}  // namespace

TEST_CASE("parse_catalog reads records and enforces unique ids") {
  std::string text = R"([
    {"id": "a", "name": "a", "primary_language": "Java", "loc": 100,
     "commit_count": 10, "last_commit_at": 1700000000, "stars": 5,
     "contributors": 2, "purpose_tag": "software"},
    {"id": "b", "primary_language": "C++", "commit_count": 3},
    {"id": "c"}
  ])";
  auto records = parse_catalog(text);
  REQUIRE(records.size() == 3);
  CHECK(records[0].id == "a");
  CHECK(records[1].primary_language == "C++");

  CHECK(parse_catalog("[]").empty());

  try {
    parse_catalog(R"([{"id": "a"}, {"id": "a"}])");
    FAIL("expected DUPLICATE_REPO_ID");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::duplicate_repo_id);
  }
  CHECK_THROWS_AS(parse_catalog(R"([{"id": "a", "loc": -3}])"), Error);
}

TEST_CASE("criteria with inverted LOC bounds are rejected") {
  try {
    parse_criteria(R"({"min_loc": 100, "max_loc": 10})");
    FAIL("expected BAD_CRITERIA");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_criteria);
  }
}

TEST_CASE("apply_criteria with empty criteria accepts everything") {
  std::vector<RepoRecord> records = {repo("a", "Java", 10, 1),
                                     repo("b", "C++", 20, 2)};
  auto report = apply_criteria(records, SelectionCriteria{}, kNow);
  CHECK(report.accepted.size() == 2);
  CHECK(report.rejected.empty());
  CHECK(report.warnings.empty());
}

TEST_CASE("apply_criteria rejects forks when asked") {
  auto r = repo("f", "Java", 10, 1);
  r.is_fork = true;
  SelectionCriteria c;
  c.exclude_forks = true;
  auto report = apply_criteria({r}, c, kNow);
  REQUIRE(report.rejected.size() == 1);
  CHECK(report.rejected[0].criterion == "exclude_forks");
}

TEST_CASE("apply_criteria enforces the activity window") {
  auto r = repo("stale", "Java", 10, 1);
  r.last_commit_at = kNow - 200 * 86400;
  SelectionCriteria c;
  c.active_within_days = 180;
  auto report = apply_criteria({r}, c, kNow);
  REQUIRE(report.rejected.size() == 1);
  CHECK(report.rejected[0].criterion == "active_within_days");

  r.last_commit_at = kNow + 3600;  // future clocks tolerated
  CHECK(apply_criteria({r}, c, kNow).accepted.size() == 1);
}

TEST_CASE("min_stars filtering carries the proxy caution") {
  SelectionCriteria c;
  c.min_stars = 100;
  auto report = apply_criteria({repo("a", "Java", 10, 500)}, c, kNow);
  CHECK(report.accepted.size() == 1);
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.warnings[0].find("STAR_PROXY_CAUTION") != std::string::npos);
}

TEST_CASE("rejection names the first failing criterion in field order") {
  auto r = repo("x", "Go", 1, 0, PurposeTag::website);
  r.is_fork = true;
  SelectionCriteria c;
  c.languages = std::set<std::string>{"Java"};
  c.min_commits = 100;
  c.exclude_forks = true;
  c.allowed_purposes = {PurposeTag::software};
  auto report = apply_criteria({r}, c, kNow);
  REQUIRE(report.rejected.size() == 1);
  CHECK(report.rejected[0].criterion == "languages");
}

TEST_CASE("tightening a criterion never grows the accepted set") {
  std::mt19937_64 rng(7);
  std::vector<RepoRecord> records;
  for (int i = 0; i < 40; ++i) {
    auto r = repo("r" + std::to_string(i), i % 2 ? "Java" : "C++",
                  static_cast<std::int64_t>(rng() % 500),
                  static_cast<std::int64_t>(rng() % 1000));
    r.is_fork = rng() % 3 == 0;
    records.push_back(r);
  }
  SelectionCriteria loose;
  loose.min_commits = 10;
  SelectionCriteria tight = loose;
  tight.min_commits = 200;
  tight.exclude_forks = true;
  auto a = apply_criteria(records, loose, kNow);
  auto b = apply_criteria(records, tight, kNow);
  std::set<std::string> accepted_loose(a.accepted.begin(), a.accepted.end());
  for (const auto& id : b.accepted) CHECK(accepted_loose.count(id) == 1);
}

TEST_CASE("compute_sample_size matches the closed-form oracle") {
  CHECK(compute_sample_size(10000, Confidence::c95, 0.05, 0.5) == 370);
  CHECK(compute_sample_size(1000000000, Confidence::c95, 0.05, 0.5) == 385);
  CHECK(compute_sample_size(1, Confidence::c95, 0.05, 0.5) == 1);

  CHECK(compute_sample_size(10000, Confidence::c95, 0.05, 0.5) ==
        msrtest::oracle_cochran(10000, 1.960, 0.05, 0.5));
  CHECK(compute_sample_size(1000000000, Confidence::c95, 0.05, 0.5) ==
        msrtest::oracle_cochran(1000000000, 1.960, 0.05, 0.5));
  CHECK(compute_sample_size(5000, Confidence::c90, 0.03, 0.3) ==
        msrtest::oracle_cochran(5000, 1.645, 0.03, 0.3));
  CHECK(compute_sample_size(777, Confidence::c99, 0.1, 0.5) ==
        msrtest::oracle_cochran(777, 2.576, 0.1, 0.5));
}

TEST_CASE("compute_sample_size rejects out-of-range inputs") {
  CHECK_THROWS_AS(compute_sample_size(100, Confidence::c95, 0.0, 0.5), Error);
  CHECK_THROWS_AS(compute_sample_size(100, Confidence::c95, 1.0, 0.5), Error);
  CHECK_THROWS_AS(compute_sample_size(100, Confidence::c95, 0.05, 0.0), Error);
  CHECK_THROWS_AS(compute_sample_size(0, Confidence::c95, 0.05, 0.5), Error);
}

TEST_CASE("sample size is monotone in population and margin") {
  std::int64_t prev = 0;
  for (std::int64_t n = 10; n <= 100000; n *= 2) {
    auto s = compute_sample_size(n, Confidence::c95, 0.05, 0.5);
    CHECK(s >= prev);
    prev = s;
  }
  std::int64_t prev_margin = compute_sample_size(100000, Confidence::c95, 0.01, 0.5);
  for (double e = 0.02; e < 0.5; e += 0.01) {
    auto s = compute_sample_size(100000, Confidence::c95, e, 0.5);
    CHECK(s <= prev_margin);
    prev_margin = s;
  }
}

TEST_CASE("stratified_sample returns everything when n covers the catalog") {
  std::vector<RepoRecord> records = {repo("a", "Java", 1, 0),
                                     repo("b", "C++", 2, 0)};
  CHECK(stratified_sample(records, "primary_language", 5, 1).size() == 2);
  CHECK(stratified_sample(records, "primary_language", 2, 1).size() == 2);
}

TEST_CASE("stratified_sample is deterministic for a seed") {
  std::vector<RepoRecord> records;
  for (int i = 0; i < 50; ++i)
    records.push_back(repo("r" + std::to_string(i), i % 3 ? "Java" : "C++",
                           i, i));
  auto s1 = stratified_sample(records, "primary_language", 10, 42);
  auto s2 = stratified_sample(records, "primary_language", 10, 42);
  REQUIRE(s1.size() == s2.size());
  for (size_t i = 0; i < s1.size(); ++i) CHECK(s1[i].id == s2[i].id);
  auto s3 = stratified_sample(records, "primary_language", 10, 43);
  bool same = s3.size() == s1.size();
  if (same)
    for (size_t i = 0; i < s1.size(); ++i)
      if (s1[i].id != s3[i].id) same = false;
  CHECK_FALSE(same);  // a different seed draws a different sample
}

TEST_CASE("stratified_sample allocates proportionally") {
  std::vector<RepoRecord> records;
  for (int i = 0; i < 80; ++i)
    records.push_back(repo("j" + std::to_string(i), "Java", i, 0));
  for (int i = 0; i < 20; ++i)
    records.push_back(repo("c" + std::to_string(i), "C++", i, 0));
  auto sample = stratified_sample(records, "primary_language", 10, 7);
  size_t java = 0, cpp = 0;
  for (const auto& r : sample) (r.primary_language == "Java" ? java : cpp) += 1;
  CHECK(java == 8);
  CHECK(cpp == 2);
}

TEST_CASE("stratified proportions stay within one record per stratum") {
  std::mt19937_64 rng(13);
  std::vector<RepoRecord> records;
  for (int i = 0; i < 97; ++i) {
    const char* langs[] = {"Java", "C++", "Go", "Rust"};
    records.push_back(repo("r" + std::to_string(i), langs[rng() % 4],
                           static_cast<std::int64_t>(i), 0));
  }
  const size_t n = 31;
  auto sample = stratified_sample(records, "primary_language", n, 5);
  REQUIRE(sample.size() == n);
  std::map<std::string, double> pop, got;
  for (const auto& r : records) pop[r.primary_language] += 1;
  for (const auto& r : sample) got[r.primary_language] += 1;
  for (const auto& [lang, count] : pop) {
    const double expect = static_cast<double>(n) * count / 97.0;
    CHECK(std::abs(got[lang] - expect) <= 1.0);
  }
}

TEST_CASE("stratified_sample rejects unknown strata fields") {
  std::vector<RepoRecord> records = {repo("a", "Java", 1, 0), repo("b", "Go", 1, 0)};
  try {
    stratified_sample(records, "nonsense", 1, 0);
    FAIL("expected UNKNOWN_FIELD");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_field);
  }
}
