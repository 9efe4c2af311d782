#ifndef MSR_STATS_HPP
#define MSR_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msr/common.hpp"

namespace msr {

struct Summary {
  size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double mode = 0.0;  // smallest value among the most frequent
  double sample_std = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct FiveNumber {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

enum class Magnitude { negligible, small, medium, large };

inline const char* magnitude_name(Magnitude m) {
  switch (m) {
    case Magnitude::negligible: return "negligible";
    case Magnitude::small: return "small";
    case Magnitude::medium: return "medium";
    case Magnitude::large: return "large";
  }
  return "negligible";
}

struct Effect {
  double delta = 0.0;
  Magnitude magnitude = Magnitude::negligible;
};

enum class TestMethod { exact, normal_approx };

inline const char* test_method_name(TestMethod m) {
  return m == TestMethod::exact ? "exact" : "normal_approx";
}

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  TestMethod method = TestMethod::normal_approx;
  std::optional<Effect> effect;
  std::string note;
};

namespace detail {

inline double interpolated_quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = static_cast<size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Survival function of the Kolmogorov distribution,
/// Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 1000; ++j) {
    double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-12) return std::clamp(2.0 * sum, 0.0, 1.0);
    sign = -sign;
  }
  return 1.0;  // series failed to converge: no evidence against H0
}

/// Midranks of the pooled sample, returned per input position.
inline std::vector<double> midranks(const std::vector<double>& pooled) {
  const size_t n = pooled.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return pooled[a] < pooled[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace detail

inline Summary describe(const std::vector<double>& values) {
  if (values.empty()) throw Error(Errc::empty_sample, "describe of empty sample");
  Summary s;
  s.n = values.size();
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = detail::interpolated_quantile(sorted, 0.5);

  double sum = 0.0;
  for (double v : sorted) sum += v;
  s.mean = sum / static_cast<double>(s.n);

  if (s.n > 1) {
    double ss = 0.0;
    for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
    s.sample_std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }

  std::map<double, size_t> freq;
  for (double v : sorted) freq[v] += 1;
  size_t best = 0;
  for (const auto& [value, count] : freq) {
    if (count > best) {  // map order makes ties resolve to the smallest value
      best = count;
      s.mode = value;
    }
  }
  return s;
}

/// Quartiles by linear interpolation of the sorted order statistics at
/// positions (n-1)*q.
inline FiveNumber five_number(const std::vector<double>& values) {
  if (values.empty()) throw Error(Errc::empty_sample, "five_number of empty sample");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  FiveNumber f;
  f.min = sorted.front();
  f.max = sorted.back();
  f.q1 = detail::interpolated_quantile(sorted, 0.25);
  f.median = detail::interpolated_quantile(sorted, 0.5);
  f.q3 = detail::interpolated_quantile(sorted, 0.75);
  return f;
}

/// One-sample Kolmogorov-Smirnov screen against a normal fitted with
/// the sample's own mean and standard deviation.
inline TestResult ks_normality(const std::vector<double>& values) {
  if (values.size() < 8)
    throw Error(Errc::insufficient_sample,
                "need n >= 8, got " + std::to_string(values.size()));
  Summary s = describe(values);
  if (s.sample_std == 0.0)
    throw Error(Errc::zero_variance, "constant sample");

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = detail::normal_cdf((sorted[i] - s.mean) / s.sample_std);
    d = std::max(d, static_cast<double>(i + 1) / n - cdf);
    d = std::max(d, cdf - static_cast<double>(i) / n);
  }
  TestResult r;
  r.statistic = d;
  r.method = TestMethod::normal_approx;
  r.p_value = detail::kolmogorov_q(std::sqrt(n) * d);
  r.note =
      "normal parameters estimated from the sample; the asymptotic p-value "
      "is anti-conservative (Lilliefors effect)";
  return r;
}

/// Two-sided Mann-Whitney U for sample a. Exact p by enumeration of
/// rank assignments when n_a+n_b <= 12 and the pooled sample is
/// tie-free; otherwise normal approximation with tie-corrected variance
/// and continuity correction.
inline TestResult mann_whitney(const std::vector<double>& a,
                               const std::vector<double>& b) {
  if (a.empty() || b.empty())
    throw Error(Errc::empty_sample, "mann_whitney needs two non-empty samples");
  const size_t na = a.size();
  const size_t nb = b.size();
  const size_t n = na + nb;

  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> ranks = detail::midranks(pooled);

  double rank_sum_a = 0.0;
  for (size_t i = 0; i < na; ++i) rank_sum_a += ranks[i];
  const double u_a = rank_sum_a - static_cast<double>(na) *
                                      static_cast<double>(na + 1) / 2.0;

  std::map<double, size_t> tie_groups;
  for (double v : pooled) tie_groups[v] += 1;
  const bool has_ties = tie_groups.size() != n;

  TestResult r;
  r.statistic = u_a;

  if (n <= 12 && !has_ties) {
    // Full enumeration over which rank positions sample a occupies.
    std::vector<size_t> comb(na);
    for (size_t i = 0; i < na; ++i) comb[i] = i;
    std::int64_t total = 0, c_le = 0, c_ge = 0;
    const double base = static_cast<double>(na) * static_cast<double>(na + 1) / 2.0;
    while (true) {
      double sum = 0.0;
      for (size_t idx : comb) sum += static_cast<double>(idx + 1);
      const double u = sum - base;
      ++total;
      if (u <= u_a) ++c_le;
      if (u >= u_a) ++c_ge;
      // next combination of {0..n-1} choose na
      size_t i = na;
      while (i > 0 && comb[i - 1] == n - na + i - 1) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (size_t j = i; j < na; ++j) comb[j] = comb[j - 1] + 1;
    }
    r.method = TestMethod::exact;
    r.p_value = std::min(
        1.0, 2.0 * static_cast<double>(std::min(c_le, c_ge)) /
                 static_cast<double>(total));
    return r;
  }

  const double mu = static_cast<double>(na) * static_cast<double>(nb) / 2.0;
  double tie_term = 0.0;
  for (const auto& [value, t] : tie_groups) {
    const double td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  const double nn = static_cast<double>(n);
  const double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                     ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
  r.method = TestMethod::normal_approx;
  if (var <= 0.0) {
    r.p_value = 1.0;  // fully tied pooled sample
    return r;
  }
  const double z = std::max(0.0, std::abs(u_a - mu) - 0.5) / std::sqrt(var);
  r.p_value = std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
  return r;
}

/// delta = (#{a_i > b_j} - #{a_i < b_j}) / (n_a * n_b), with the usual
/// magnitude thresholds 0.147 / 0.33 / 0.474.
inline Effect cliffs_delta(const std::vector<double>& a,
                           const std::vector<double>& b) {
  if (a.empty() || b.empty())
    throw Error(Errc::empty_sample, "cliffs_delta needs two non-empty samples");
  std::int64_t greater = 0, less = 0;
  for (double x : a) {
    for (double y : b) {
      if (x > y) ++greater;
      else if (x < y) ++less;
    }
  }
  Effect e;
  e.delta = static_cast<double>(greater - less) /
            (static_cast<double>(a.size()) * static_cast<double>(b.size()));
  const double ad = std::abs(e.delta);
  if (ad < 0.147) e.magnitude = Magnitude::negligible;
  else if (ad < 0.33) e.magnitude = Magnitude::small;
  else if (ad < 0.474) e.magnitude = Magnitude::medium;
  else e.magnitude = Magnitude::large;
  return e;
}

/// significant iff p < alpha / m.
inline std::vector<std::pair<double, bool>> bonferroni(
    const std::vector<double>& p_values, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(Errc::out_of_range, "alpha must be in (0,1)");
  for (double p : p_values)
    if (!(p >= 0.0 && p <= 1.0))
      throw Error(Errc::out_of_range, "p-value outside [0,1]");
  std::vector<std::pair<double, bool>> out;
  const double threshold =
      p_values.empty() ? alpha : alpha / static_cast<double>(p_values.size());
  for (double p : p_values) out.emplace_back(p, p < threshold);
  return out;
}

}  // namespace msr

#endif  // MSR_STATS_HPP
