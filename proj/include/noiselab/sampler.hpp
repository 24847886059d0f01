#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "noiselab/mixture.hpp"
#include "noiselab/noise.hpp"
#include "noiselab/parallel.hpp"
#include "noiselab/schedule.hpp"

namespace noiselab {

// Raised when a sampler state stops being finite; carries the step index.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Full record of one reverse pass: states y_T .. y_0 and, optionally, the
// eps output consumed at each step.
struct Trajectory {
  int T = 0;
  int d = 0;
  bool has_eps = false;
  std::vector<double> states;  // (T+1)*d; row t holds y_t
  std::vector<double> eps;     // T*d when recorded; row t-1 holds eps at step t

  std::span<const double> state(int t) const {
    return {states.data() + static_cast<std::size_t>(t) * d,
            static_cast<std::size_t>(d)};
  }
  std::span<const double> eps_at(int t) const {
    return {eps.data() + static_cast<std::size_t>(t - 1) * d,
            static_cast<std::size_t>(d)};
  }
  std::span<const double> output() const { return state(0); }
};

// Deterministic sampler: applies y_{t-1} = a(t) y_t + b(t) eps(t, y_t)
// from t = T down to 1.
Trajectory ddim_sample(const ScoreField& score, const Schedule& schedule,
                       std::span<const double> z_init, bool record_eps = true);

// Stochastic sampler. Per-step update
//   y_{t-1} = (y_t - (1-alpha_t)/sqrt(1-alpha_bar_t) eps) / sqrt(alpha_t)
//             + sigma_scale * sigma_t z_t,
// with fresh z_t for t > 1 and z_1 = 0. A paired run sharing the same
// step_noise stream with negate_all set sees the exact negation of both
// z_init and every z_t.
Trajectory ddpm_sample(const ScoreField& score, const Schedule& schedule,
                       std::span<const double> z_init, RngStream step_noise,
                       bool negate_all = false, double sigma_scale = 1.0,
                       bool record_eps = true);

// Batch kernels; one trajectory per input row. The serial policy is the
// reference; openmp must match it bit for bit.
std::vector<Trajectory> ddim_sample_batch(const ScoreField& score,
                                          const Schedule& schedule,
                                          const NoiseBatch& batch,
                                          bool record_eps,
                                          ExecPolicy policy);

// Batch of outputs only (y_0 rows), when trajectories are not needed.
std::vector<double> ddim_output_batch(const ScoreField& score,
                                      const Schedule& schedule,
                                      const NoiseBatch& batch,
                                      ExecPolicy policy);

// Raw little-endian float64 payload (states, then eps when recorded) at
// <prefix>.bin plus a JSON sidecar at <prefix>.json. Whether eps rows are
// stored follows the trajectory's own record flag.
void save_trajectory(const Trajectory& traj, const std::string& prefix);
Trajectory load_trajectory(const std::string& prefix);

}  // namespace noiselab
