#pragma once

// Student-t distribution and the pooled one-sided two-sample t-test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mtbias::stats {

namespace detail {

inline constexpr int kMaxIterations = 300;
inline constexpr double kTolerance = 1e-14;

// Modified Lentz evaluation of the incomplete-beta continued fraction.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kTolerance) return h;
  }
  throw std::runtime_error("incomplete beta: continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw std::domain_error("incomplete_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("incomplete_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// P(T <= t) for Student's t with `df` degrees of freedom.
inline double t_cdf(double t, double df) {
  if (!(df >= 1.0)) throw std::domain_error("t_cdf: df must be >= 1");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
  return t > 0 ? 1.0 - tail : tail;
}

enum class Alternative { Greater, Less };

inline std::string_view to_string(Alternative a) { return a == Alternative::Greater ? "Greater" : "Less"; }

struct BinarySample {
  std::string label;
  std::vector<std::uint8_t> values;

  double mean() const {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(ones()) / static_cast<double>(values.size());
  }
  std::size_t ones() const { return static_cast<std::size_t>(std::count(values.begin(), values.end(), 1)); }
  std::size_t size() const { return values.size(); }
};

struct TTestResult {
  double t_statistic = 0;
  long long degrees_of_freedom = 0;
  double p_value = 0;
  Alternative direction = Alternative::Greater;
};

class DegenerateSampleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Equal-variance two-sample t-test; Greater tests mean(a) > mean(b).
inline TTestResult t_test_one_sided(const BinarySample& a, const BinarySample& b, Alternative direction) {
  for (const auto* s : {&a, &b}) {
    if (s->size() < 2) throw std::invalid_argument("t-test sample '" + s->label + "' needs at least 2 values");
    for (auto v : s->values)
      if (v > 1) throw std::invalid_argument("t-test sample '" + s->label + "' holds a non-binary value");
  }
  auto sum_sq = [](const BinarySample& s, double mean) {
    double acc = 0;
    for (auto v : s.values) acc += (v - mean) * (v - mean);
    return acc;
  };
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = a.mean();
  const double mb = b.mean();
  const double df = na + nb - 2.0;
  const double pooled = (sum_sq(a, ma) + sum_sq(b, mb)) / df;
  if (!(pooled > 0))
    throw DegenerateSampleError("zero pooled variance between '" + a.label + "' and '" + b.label + "'");
  const double t = (ma - mb) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  TTestResult r;
  r.t_statistic = t;
  r.degrees_of_freedom = static_cast<long long>(df);
  r.direction = direction;
  r.p_value = direction == Alternative::Greater ? t_cdf(-t, df) : t_cdf(t, df);
  return r;
}

}  // namespace mtbias::stats
