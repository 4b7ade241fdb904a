#include "ratelab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ratelab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_sum_exp(const std::vector<double>& terms) {
  double m = kNegInf;
  for (double t : terms) {
    if (std::isnan(t)) throw std::domain_error("log_sum_exp: NaN term");
    m = std::max(m, t);
  }
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : terms)
    if (t != kNegInf) s += std::exp(t - m);
  return m + std::log(s);
}

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

double log1mexp(double x) {
  if (x > 0.0) throw std::domain_error("log1mexp: positive argument");
  if (x == 0.0) return kNegInf;
  // Split at -log 2 for accuracy (Maechler's rule).
  if (x > -0.6931471805599453) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

double log_expm1_ratio(double u) {
  if (std::isnan(u)) throw std::domain_error("log_expm1_ratio: NaN");
  const double au = std::fabs(u);
  if (au < 1e-4) return std::log1p(u / 2.0 + u * u / 6.0);
  if (u > 0.0) return u + log1mexp(-u) - std::log(u);
  return log1mexp(u) - std::log(-u);
}

double log_normal_upper(double z) {
  if (std::isnan(z)) throw std::domain_error("log_normal_upper: NaN");
  if (z < -20.0) {
    // P(Z > z) = 1 - P(Z > -z); the complement is ~exp(-z^2/2), negligible.
    return std::log1p(-std::exp(log_normal_upper(-z)));
  }
  if (z <= 20.0) {
    return std::log(0.5 * std::erfc(z / std::sqrt(2.0)));
  }
  // Asymptotic series Q(z) = phi(z)/z * (1 - 1/z^2 + 3/z^4 - 15/z^6 + ...).
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * z2 - std::log(z) - 0.5 * std::log(2.0 * M_PI) + std::log(series);
}

}  // namespace ratelab
