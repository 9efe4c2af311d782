#ifndef MSR_TESTS_ORACLES_HPP
#define MSR_TESTS_ORACLES_HPP

// Independent oracle implementations used to freeze expected values.
// These intentionally avoid the library's code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace msrtest {

/// Normalized Shannon entropy, direct evaluation of -sum p*log2 p.
inline double oracle_entropy(const std::vector<std::int64_t>& counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  if (counts.size() <= 1 || total == 0.0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h / std::log2(static_cast<double>(std::max<std::size_t>(counts.size(), 2)));
}

/// Cochran sample size with finite population correction, coded from
/// the closed form.
inline std::int64_t oracle_cochran(std::int64_t population, double z, double e,
                                   double p) {
  const double n0 = (z * z) * p * (1.0 - p) / (e * e);
  const double n = n0 / (1.0 + (n0 - 1.0) / static_cast<double>(population));
  const auto up = static_cast<std::int64_t>(std::ceil(n));
  return up > population ? population : up;
}

struct OracleMwu {
  double u = 0.0;
  double p = 1.0;
};

/// Brute-force Mann-Whitney: U by direct pair counting, exact two-sided
/// p by enumerating every subset assignment via bitmask.
inline OracleMwu oracle_mwu_exact(const std::vector<double>& a,
                                  const std::vector<double>& b) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t n = na + nb;
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());

  auto u_of = [&](const std::vector<double>& xs, const std::vector<double>& ys) {
    double u = 0.0;
    for (double x : xs)
      for (double y : ys) {
        if (x > y) u += 1.0;
        else if (x == y) u += 0.5;
      }
    return u;
  };
  OracleMwu result;
  result.u = u_of(a, b);

  std::int64_t total = 0, c_le = 0, c_ge = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != na) continue;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < n; ++i)
      ((mask >> i) & 1u ? xs : ys).push_back(pooled[i]);
    const double u = u_of(xs, ys);
    ++total;
    if (u <= result.u) ++c_le;
    if (u >= result.u) ++c_ge;
  }
  result.p = std::min(
      1.0, 2.0 * static_cast<double>(std::min(c_le, c_ge)) /
               static_cast<double>(total));
  return result;
}

/// Brute-force Cliff's delta by pair counting.
inline double oracle_cliffs(const std::vector<double>& a,
                            const std::vector<double>& b) {
  std::int64_t gt = 0, lt = 0;
  for (double x : a)
    for (double y : b) {
      if (x > y) ++gt;
      if (x < y) ++lt;
    }
  return static_cast<double>(gt - lt) /
         (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

/// Standard normal quantile by bisection on erf; plenty for test data.
inline double oracle_normal_quantile(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2.0;
    const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
    (cdf < p ? lo : hi) = mid;
  }
  return (lo + hi) / 2.0;
}

}  // namespace msrtest

#endif  // MSR_TESTS_ORACLES_HPP
