#pragma once

#include <span>
#include <vector>

#include "noiselab/rng.hpp"
#include "noiselab/schedule.hpp"

namespace noiselab {

// Isotropic Gaussian mixture standing in for the data distribution p_0.
struct MixtureParams {
  int d = 0;
  std::vector<double> weights;  // nonnegative, sum to 1
  std::vector<double> means;    // K*d, row-major
  std::vector<double> sigma2;   // K component variances

  int components() const { return static_cast<int>(weights.size()); }
  std::span<const double> mean(int k) const {
    return {means.data() + static_cast<std::size_t>(k) * d,
            static_cast<std::size_t>(d)};
  }
  void validate() const;
  std::vector<double> mixture_mean() const;
};

// Mixture with per-component isotropic variance; the closed form of any
// forward-noised mixture, shared by the discrete schedule (means scaled by
// sqrt(alpha_bar), variance alpha_bar*sigma2 + 1-alpha_bar) and the
// continuous OU flow (e^{-t} means, e^{-2t}*sigma2 + 1-e^{-2t}).
struct MixtureMarginal {
  int d = 0;
  std::vector<double> weights;
  std::vector<double> means;  // K*d
  std::vector<double> vars;   // K

  int components() const { return static_cast<int>(weights.size()); }
  std::span<const double> mean(int k) const {
    return {means.data() + static_cast<std::size_t>(k) * d,
            static_cast<std::size_t>(d)};
  }

  double log_density(std::span<const double> x) const;
  double density(std::span<const double> x) const;
  // grad log p(x); log-domain responsibilities keep this stable when the
  // component densities underflow.
  void score(std::span<const double> x, std::span<double> out) const;
  // Hessian of log p at x, row-major d*d (intended for small d).
  void log_density_hessian(std::span<const double> x,
                           std::span<double> out) const;
  void sample(Rng& rng, std::span<double> out) const;
};

MixtureMarginal forward_marginal(const MixtureParams& p, double alpha_bar);
MixtureMarginal ou_marginal(const MixtureParams& p, double t);

// Noise-prediction evaluation contract: eps(t, x) with the convention
// eps = -sqrt(1 - alpha_bar[t]) * grad log p_t(x).
class ScoreField {
 public:
  virtual ~ScoreField() = default;
  virtual int dim() const = 0;
  virtual void eval(int t, std::span<const double> x,
                    std::span<double> eps_out) const = 0;
};

// Exact score of the noised mixture under the given schedule.
class MixtureScoreField : public ScoreField {
 public:
  MixtureScoreField(MixtureParams params, Schedule schedule);

  int dim() const override { return params_.d; }
  void eval(int t, std::span<const double> x,
            std::span<double> eps_out) const override;

  const MixtureParams& params() const { return params_; }
  const Schedule& schedule() const { return schedule_; }
  const MixtureMarginal& marginal(int t) const { return marginals_[t]; }

 private:
  MixtureParams params_;
  Schedule schedule_;
  std::vector<MixtureMarginal> marginals_;  // index 0..T
};

std::vector<double> exact_mixture_eps(const MixtureParams& params,
                                      const Schedule& schedule, int t,
                                      std::span<const double> x);

}  // namespace noiselab
