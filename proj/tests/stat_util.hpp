#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

// Chi-square goodness-of-fit machinery for the sampler tests. The
// regularized incomplete gamma functions are hand-rolled (series +
// continued fraction) and pinned against independently computed values in
// test_stat_util.cpp.
namespace dpp::stat {

inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), modified Lentz.
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p domain");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

// P(Chi2_dof > stat).
inline double chi_square_sf(double stat, int dof) {
  if (stat <= 0.0) return 1.0;
  const double p = gamma_p(0.5 * static_cast<double>(dof), 0.5 * stat);
  return 1.0 - p;
}

inline double chi_square_stat(const std::vector<double>& observed,
                              const std::vector<double>& expected) {
  if (observed.size() != expected.size()) {
    throw std::invalid_argument("chi_square_stat size mismatch");
  }
  double stat = 0.0;
  for (size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) throw std::invalid_argument("expected count <= 0");
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  return stat;
}

}  // namespace dpp::stat
