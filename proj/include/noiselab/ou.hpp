#pragma once

#include <functional>
#include <span>
#include <vector>

#include "noiselab/mixture.hpp"
#include "noiselab/rng.hpp"

namespace noiselab {

// Density on R^dim with a score (gradient of log density) oracle.
struct DensityWithScore {
  int dim = 1;
  std::function<double(std::span<const double>)> pdf;
  std::function<void(std::span<const double>, std::span<double>)> score;
};

DensityWithScore density_from_marginal(const MixtureMarginal& m);

struct FiOptions {
  double lo = -12.0;
  double hi = 12.0;
  int panels = 48;          // composite Gauss-Legendre panels per axis
  int points_per_panel = 16;
  double mass_tolerance = 1e-6;
};

// Relative Fisher information against the standard Gaussian,
// integral of ||score(x) + x||^2 p(x) dx, for dim 1 or 2. Rejects densities
// whose quadrature mass deviates from 1 by more than the tolerance.
double relative_fisher_information(const DensityWithScore& p,
                                   const FiOptions& opts = {});

double relative_fisher_information(const MixtureMarginal& m,
                                   const FiOptions& opts = {});

struct SymmetryCheckReport {
  double max_density_residual = 0.0;
  double max_score_residual = 0.0;
};

// Verifies that the forward flow preserves a reflection/permutation
// symmetry of the mixture: reports the largest |p_t(mu_t + g x) -
// p_t(mu_t + x)| and ||s_t(mu_t + g x) - g s_t(mu_t + x)|| over probes and
// over the time grid, with mu_t = e^{-t} mu. g is a d x d orthogonal
// matrix (row-major). By default a mixture that is not symmetric under g
// is rejected; pass require_symmetric = false to probe broken symmetry.
SymmetryCheckReport symmetry_preservation_check(
    const MixtureParams& mixture, std::span<const double> g,
    std::span<const double> t_grid, int probe_count, RngStream stream,
    bool require_symmetric = true);

// Empirical check of the one-step correlation bound on a 1-D shifted
// Gaussian N(shift, 1), where every ingredient is closed-form: the map is
// F(x) = a x + b s_t(x) with s_t the exact OU-evolved score, the initial
// Fisher information is shift^2, and the bound is
//   2 |b| e^{-t} sqrt(FI_0) / sqrt(v),   v = Var F.
struct OneStepBoundReport {
  double measured_corr = 0.0;    // sample Corr(F(X), F(-X)), X ~ mu_t
  double measured_gap = 0.0;     // |corr + 1|
  double bound = 0.0;
  double ratio = 0.0;            // measured_gap / bound
  double map_variance = 0.0;
};

OneStepBoundReport one_step_ddim_correlation_bound(double shift, double ou_t,
                                                   double a_t, double b_t,
                                                   int sample_count,
                                                   RngStream stream);

}  // namespace noiselab
