#pragma once

#include <functional>
#include <span>
#include <vector>

#include "noiselab/mixture.hpp"
#include "noiselab/rng.hpp"
#include "noiselab/schedule.hpp"

namespace noiselab {

// Scalar feed-forward chain h -> ReLU(w h + b), layer by layer. Each layer
// is monotone, so the composite map is monotone in its input.
struct MonotoneChain {
  std::vector<double> weights;
  std::vector<double> biases;

  double operator()(double x) const;
};

MonotoneChain build_random_chain(RngStream stream, int depth,
                                 double weight_scale = 1.0);

struct CorrEstimate {
  double rho = 0.0;
  double std_error = 0.0;  // delete-1 jackknife
};

// Empirical Corr(f(Z), f(-Z)) over n standard-normal draws. Throws
// std::domain_error when f is constant on the sample (the correlation is
// undefined, not zero).
CorrEstimate antithetic_corr(const std::function<double(double)>& f, int n,
                             RngStream stream);

// Map R^in -> R^out whose every output is monotone in each input coordinate
// with the declared sign (+1 nondecreasing, -1 nonincreasing).
struct PartialMonotoneMap {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<int> input_signs;
  std::function<void(std::span<const double>, std::span<double>)> eval;
};

// Empirical Corr(S(F(Z)), S(F(-Z))) for a linear statistic S given by
// weights; same degenerate-input contract as antithetic_corr.
CorrEstimate partial_monotone_corr(const PartialMonotoneMap& map,
                                   std::span<const double> s_weights, int n,
                                   RngStream stream);

// Evidence report for the one-step curvature condition at step t: the map
// y -> a(t) y + c(t) s_t(y) is coordinatewise nondecreasing when
// a(t) >= c(t) * kappa_t, with kappa_t = sup of the largest diagonal
// curvature -dd log p_t. kappa is estimated on probes drawn from the
// marginal; mixed partials below -tolerance are counter-evidence reported
// via min_offdiagonal.
//
// With the exact mixture score the condition holds for every decreasing
// schedule (the curvature of a noised isotropic mixture never exceeds
// 1/(1 - alpha_bar_t)); score_scale != 1 models an imperfect score, rescaled
// as in the one-step analysis, and can drive the condition to fail.
struct MonotonicityReport {
  int t = 0;
  double a = 0.0;
  double c = 0.0;                 // includes score_scale
  double kappa = 0.0;             // max over probes of max_i(-H_ii)
  double min_offdiagonal = 0.0;   // min over probes of min_{i!=j} H_ij
  bool condition_holds = false;   // a >= c * kappa
  double min_jacobian_entry = 0.0;  // finite differences of the step map
};

MonotonicityReport ddim_monotonicity_check(const MixtureParams& mixture,
                                           const Schedule& schedule, int t,
                                           int probe_count, RngStream stream,
                                           double score_scale = 1.0);

// All steps plus finite differences of the composed map z -> y_0.
struct ChainMonotonicityReport {
  std::vector<MonotonicityReport> steps;
  bool condition_holds_everywhere = false;
  double min_composed_jacobian_entry = 0.0;
};

ChainMonotonicityReport ddim_chain_monotonicity_check(
    const MixtureParams& mixture, const Schedule& schedule, int probe_count,
    RngStream stream);

}  // namespace noiselab
