#pragma once

namespace noiselab {

// Standard normal CDF, computed through erfc so the tails keep full
// relative precision.
double norm_cdf(double x);

// Standard normal density.
double norm_pdf(double x);

// Inverse standard normal CDF. Absolute error below 1e-12 for
// p in [1e-15, 1 - 1e-15]; throws std::domain_error outside (0,1).
double norm_ppf(double p);

}  // namespace noiselab
