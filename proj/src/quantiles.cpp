#include "noiselab/quantiles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "noiselab/normal.hpp"

namespace noiselab {

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 3e-16) break;
  }
  return h;
}

}  // namespace

double normal_quantile(double p) { return norm_ppf(p); }

double inc_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) {
    throw std::invalid_argument("inc_beta: a and b must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * beta_cf(a, b, x) / a;
  }
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double inv_inc_beta(double a, double b, double y) {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  double x = 0.5;
  const double ln_b = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  for (int it = 0; it < 200; ++it) {
    const double f = inc_beta(a, b, x) - y;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double ln_pdf =
        (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - ln_b;
    double step = f * std::exp(-ln_pdf);
    double next = x - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisect fallback
    if (std::abs(next - x) < 1e-15 * (1.0 + std::abs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

double student_t_quantile(double nu, double p) {
  if (!(nu > 0.0)) throw std::invalid_argument("student_t_quantile: nu > 0");
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("student_t_quantile: p must lie in (0,1)");
  }
  if (p == 0.5) return 0.0;
  const double q = p < 0.5 ? p : 1.0 - p;
  // P(|T| > t) = I_{nu/(nu+t^2)}(nu/2, 1/2)
  const double x = inv_inc_beta(0.5 * nu, 0.5, 2.0 * q);
  double t;
  if (x <= 0.0) {
    t = std::numeric_limits<double>::infinity();
  } else {
    t = std::sqrt(nu * (1.0 - x) / x);
  }
  return p < 0.5 ? -t : t;
}

}  // namespace noiselab
