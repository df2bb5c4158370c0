#pragma once

// Fixed-effects ANOVA, Bonferroni post-hoc contrasts, percentile bootstrap
// intervals, and the F-distribution tail they all need. The F tail is the
// regularized incomplete beta function, evaluated by Lentz's continued
// fraction; the upper tail is computed directly in its own stable form
// instead of as 1 - CDF.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rng.hpp"

namespace smithian {

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("beta_cf: continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("incomplete beta: a, b must be positive");
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                 b * std::log1p(-x);
  double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail::beta_cf(a, b, x) / a;
  return 1.0 - bt * detail::beta_cf(b, a, 1.0 - x) / b;
}

inline double f_cdf(double f, double df1, double df2) {
  if (df1 <= 0.0 || df2 <= 0.0) throw std::invalid_argument("f_cdf: degrees of freedom");
  if (f <= 0.0) return 0.0;
  if (std::isinf(f)) return 1.0;
  return regularized_incomplete_beta(df1 / 2.0, df2 / 2.0, df1 * f / (df1 * f + df2));
}

// Upper tail P(F >= f), evaluated directly: I_{df2/(df2 + df1 f)}(df2/2, df1/2).
inline double f_p_value(double f, double df1, double df2) {
  if (df1 <= 0.0 || df2 <= 0.0) throw std::invalid_argument("f_p_value: degrees of freedom");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

struct EffectTest {
  double ss = 0.0;
  std::size_t df = 0;
  double f = 0.0;
  double p = 1.0;
};

struct TwoWayAnova {
  EffectTest factor_a;  // condition main effect
  EffectTest factor_b;  // cost main effect
  EffectTest interaction;
  double ss_error = 0.0;
  std::size_t df_error = 0;
};

namespace detail {

inline double mean_of(const std::vector<double>& xs) {
  double t = 0.0;
  for (double x : xs) t += x;
  return t / static_cast<double>(xs.size());
}

}  // namespace detail

// cells[i][j] holds the replicates of factor-A level i, factor-B level j.
// The design must be balanced with at least two replicates per cell.
inline TwoWayAnova two_way_anova(const std::vector<std::vector<std::vector<double>>>& cells) {
  std::size_t a = cells.size();
  if (a < 2) throw std::invalid_argument("two_way_anova: need at least two levels of factor A");
  std::size_t b = cells[0].size();
  if (b < 1) throw std::invalid_argument("two_way_anova: factor B has no levels");
  std::size_t n = cells[0][0].size();
  if (n < 2) throw std::invalid_argument("two_way_anova: need at least two replicates per cell");
  for (const auto& row : cells) {
    if (row.size() != b) throw std::invalid_argument("two_way_anova: ragged factor B");
    for (const auto& cell : row)
      if (cell.size() != n) throw std::invalid_argument("two_way_anova: unbalanced cells");
  }

  double grand = 0.0;
  std::vector<double> mean_a(a, 0.0), mean_b(b, 0.0);
  std::vector<std::vector<double>> mean_cell(a, std::vector<double>(b, 0.0));
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) {
      mean_cell[i][j] = detail::mean_of(cells[i][j]);
      mean_a[i] += mean_cell[i][j] / static_cast<double>(b);
      mean_b[j] += mean_cell[i][j] / static_cast<double>(a);
      grand += mean_cell[i][j] / static_cast<double>(a * b);
    }

  TwoWayAnova out;
  for (std::size_t i = 0; i < a; ++i)
    out.factor_a.ss += static_cast<double>(b * n) * (mean_a[i] - grand) * (mean_a[i] - grand);
  for (std::size_t j = 0; j < b; ++j)
    out.factor_b.ss += static_cast<double>(a * n) * (mean_b[j] - grand) * (mean_b[j] - grand);
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) {
      double d = mean_cell[i][j] - mean_a[i] - mean_b[j] + grand;
      out.interaction.ss += static_cast<double>(n) * d * d;
      for (double x : cells[i][j]) out.ss_error += (x - mean_cell[i][j]) * (x - mean_cell[i][j]);
    }

  out.factor_a.df = a - 1;
  out.factor_b.df = b - 1;
  out.interaction.df = (a - 1) * (b - 1);
  out.df_error = a * b * (n - 1);

  bool zero_error = out.ss_error <= 0.0;
  double ms_error = out.ss_error / static_cast<double>(out.df_error);
  auto finish = [&](EffectTest& e) {
    if (e.ss <= 0.0) {
      e.f = 0.0;
      e.p = 1.0;
    } else if (zero_error) {
      e.f = std::numeric_limits<double>::infinity();
      e.p = 0.0;
    } else {
      e.f = (e.ss / static_cast<double>(e.df)) / ms_error;
      e.p = f_p_value(e.f, static_cast<double>(e.df), static_cast<double>(out.df_error));
    }
  };
  finish(out.factor_a);
  finish(out.factor_b);
  finish(out.interaction);
  return out;
}

struct OneWayAnova {
  double ss_between = 0.0;
  double ss_within = 0.0;
  std::size_t df1 = 0;
  std::size_t df2 = 0;
  double f = 0.0;
  double p = 1.0;
};

inline OneWayAnova one_way_anova(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw std::invalid_argument("one_way_anova: need at least two groups");
  std::size_t total_n = 0;
  double grand = 0.0;
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("one_way_anova: empty group");
    total_n += g.size();
    for (double x : g) grand += x;
  }
  grand /= static_cast<double>(total_n);
  if (total_n <= groups.size())
    throw std::invalid_argument("one_way_anova: no within-group degrees of freedom");

  OneWayAnova out;
  for (const auto& g : groups) {
    double m = detail::mean_of(g);
    out.ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double x : g) out.ss_within += (x - m) * (x - m);
  }
  out.df1 = groups.size() - 1;
  out.df2 = total_n - groups.size();
  if (out.ss_between <= 0.0) {
    out.f = 0.0;
    out.p = 1.0;
  } else if (out.ss_within <= 0.0) {
    out.f = std::numeric_limits<double>::infinity();
    out.p = 0.0;
  } else {
    out.f = (out.ss_between / static_cast<double>(out.df1)) /
            (out.ss_within / static_cast<double>(out.df2));
    out.p = f_p_value(out.f, static_cast<double>(out.df1), static_cast<double>(out.df2));
  }
  return out;
}

struct PosthocResult {
  double f = 0.0;
  std::size_t df1 = 0;
  std::size_t df2 = 0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;
};

// Pairwise contrast as a one-way F test, multiplied by the number of
// comparisons in the family and clamped to 1.
inline PosthocResult bonferroni_posthoc(const std::vector<double>& group1,
                                        const std::vector<double>& group2,
                                        std::size_t n_comparisons = 3) {
  OneWayAnova aov = one_way_anova({group1, group2});
  PosthocResult out;
  out.f = aov.f;
  out.df1 = aov.df1;
  out.df2 = aov.df2;
  out.p_raw = aov.p;
  out.p_adjusted = std::min(1.0, aov.p * static_cast<double>(n_comparisons));
  return out;
}

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Percentile bootstrap interval for the mean.
inline Interval bootstrap_ci(const std::vector<double>& values, std::size_t resamples,
                             double level, Rng& rng) {
  if (values.empty()) throw std::invalid_argument("bootstrap_ci: empty sample");
  if (resamples == 0) throw std::invalid_argument("bootstrap_ci: zero resamples");
  if (level <= 0.0 || level >= 1.0) throw std::invalid_argument("bootstrap_ci: level in (0,1)");

  std::vector<double> means(resamples);
  for (std::size_t r = 0; r < resamples; ++r) {
    double t = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) t += values[rng.next_below(values.size())];
    means[r] = t / static_cast<double>(values.size());
  }
  std::sort(means.begin(), means.end());

  auto percentile = [&](double q) {
    double pos = q * static_cast<double>(resamples - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= resamples) return means[resamples - 1];
    return means[lo] * (1.0 - frac) + means[lo + 1] * frac;
  };
  double tail = (1.0 - level) / 2.0;
  return Interval{percentile(tail), percentile(1.0 - tail)};
}

}  // namespace smithian
