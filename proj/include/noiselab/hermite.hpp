#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

namespace noiselab {

// Probabilists' Hermite polynomial H_n via the three-term recurrence
// H_{n+1} = x H_n - n H_{n-1}.
double hermite_eval(int n, double x);

// Gauss-Hermite rule rescaled to the standard Gaussian weight: the weights
// sum to 1 and the rule integrates polynomials up to degree 2*order - 1
// exactly against gamma_1.
struct GaussHermiteRule {
  explicit GaussHermiteRule(int order);
  std::vector<double> nodes;
  std::vector<double> weights;

  double integrate(const std::function<double(double)>& f) const;
};

// integral of f*g against gamma_1 by Gauss-Hermite quadrature.
double gauss_hermite_inner(const std::function<double(double)>& f,
                           const std::function<double(double)>& g, int order);

using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& alpha);
double multi_index_factorial(const MultiIndex& alpha);  // alpha!
double hermite_eval_multi(const MultiIndex& alpha, std::span<const double> x);

// Truncated expansion f(x) = sum_alpha a_alpha H_alpha(x).
struct HermiteExpansion {
  int dim = 1;
  int max_degree = 0;
  std::map<MultiIndex, double> coeffs;

  double coefficient(const MultiIndex& alpha) const;
  double evaluate(std::span<const double> x) const;
};

// Forward-flow action on coefficients: a_alpha -> a_alpha * e^{-t |alpha|}.
HermiteExpansion semigroup_apply(const HermiteExpansion& e, double t);

// || f_t - 1 ||_{L^2(gamma)} = sqrt(sum_{|alpha|>0} a_alpha^2 alpha!
// e^{-2t|alpha|}); requires the zero coefficient to equal 1 (density ratio
// normalization).
double density_ratio_norm(const HermiteExpansion& e, double t);

// Coefficients of f_0 = p0/gamma for a 1-D density p0:
// a_n = <f_0, H_n> / n! by quadrature. The caller guarantees f_0 lies in
// L^2(gamma); quadrature_order must be at least 2*max_degree.
HermiteExpansion project_density_ratio(const std::function<double(double)>& p0,
                                       int max_degree, int quadrature_order);

}  // namespace noiselab
