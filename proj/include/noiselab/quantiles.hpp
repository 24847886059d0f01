#pragma once

namespace noiselab {

// Quantiles used by the interval constructions. Internal implementations
// (inverse normal CDF, inverse regularized incomplete beta); accurate to
// better than 1e-8 over the ranges exercised here.

double normal_quantile(double p);

// Regularized incomplete beta I_x(a,b) and its inverse in x.
double inc_beta(double a, double b, double x);
double inv_inc_beta(double a, double b, double y);

// Quantile of Student's t with nu > 0 degrees of freedom.
double student_t_quantile(double nu, double p);

}  // namespace noiselab
