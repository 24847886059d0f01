#include "noiselab/normal.hpp"

#include <cmath>
#include <stdexcept>

namespace noiselab {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_ppf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("norm_ppf: argument must lie in (0,1)");
  }
  if (p == 0.5) return 0.0;
  // Reduce to the lower tail; 1-p is exact for p >= 0.5.
  const bool upper = p > 0.5;
  const double q = upper ? 1.0 - p : p;

  // Rational tail start (Abramowitz & Stegun 26.2.22, |err| < 4.5e-4),
  // polished by Newton steps against the erfc-based CDF.
  const double t = std::sqrt(-2.0 * std::log(q));
  double z = -(t - (2.30753 + 0.27061 * t) / (1.0 + t * (0.99229 + 0.04481 * t)));
  for (int it = 0; it < 4; ++it) {
    const double err = norm_cdf(z) - q;
    const double step = err / norm_pdf(z);
    z -= step;
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) break;
  }
  return upper ? -z : z;
}

}  // namespace noiselab
