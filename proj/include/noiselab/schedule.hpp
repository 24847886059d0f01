#pragma once

#include <vector>

namespace noiselab {

// Discrete noising schedule. alpha_bar has T+1 entries with alpha_bar[0] = 1
// and alpha_bar[t] strictly decreasing; step t of the deterministic sampler
// maps state t to state t-1 as  y' = a(t) * y + b(t) * eps(t, y).
struct Schedule {
  std::vector<double> alpha_bar;

  Schedule() = default;
  explicit Schedule(std::vector<double> alpha_bar_values);

  int steps() const { return static_cast<int>(alpha_bar.size()) - 1; }

  double a(int t) const;  // sqrt(alpha_bar[t-1] / alpha_bar[t])
  double b(int t) const;  // sqrt(1-alpha_bar[t-1]) - a(t)*sqrt(1-alpha_bar[t])

  // Coefficient on the score in the same update written as
  // y' = a(t) * y + score_coeff(t) * s_t(y), with eps = -sqrt(1-ab[t]) * s_t.
  double score_coeff(int t) const;

  // Continuous-time bridge: the forward marginal at step t equals the OU
  // marginal at time -log(alpha_bar[t]) / 2.
  double ou_time(int t) const;

  // Per-step quantities of the stochastic sampler.
  double step_alpha(int t) const;  // alpha_bar[t] / alpha_bar[t-1]
  double step_sigma(int t) const;  // sqrt(1 - step_alpha(t))
};

// beta linearly spaced on [beta_min, beta_max] over T steps,
// alpha_bar[t] = prod_{s<=t} (1 - beta_s).
Schedule linear_beta_schedule(int T, double beta_min, double beta_max);

}  // namespace noiselab
