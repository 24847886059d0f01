#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace noiselab {

struct EstimatorReport {
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double half_width = 0.0;
  double variance_estimate = 0.0;
  std::optional<double> rho_hat;  // estimated pair correlation, AMC only
  std::string method;
  std::int64_t sample_budget = 0;
  double confidence = 0.0;  // 1 - alpha

  std::string to_json() const;
};

// Plain Monte Carlo: mean, unbiased sample variance (divisor N-1), and the
// normal-quantile interval mu +- z * sqrt(var/N).
EstimatorReport mc_estimate(std::span<const double> values, double alpha);

// Antithetic pairs: the estimate is the mean of pair averages
// (S+ + S-)/2 and the interval uses the sample variance of those averages,
// mu +- z * sqrt(2 var / N) with N = 2K. rho_hat is the sample correlation
// of (S+, S-); it is reported but never enters the interval.
EstimatorReport amc_estimate(
    std::span<const std::pair<double, double>> pairs, double alpha);

// Replicated randomized-QMC means with the Student-t interval
// mu +- t_{R-1,1-alpha/2} * sd / sqrt(R).
EstimatorReport rqmc_estimate(std::span<const double> replicate_means,
                              double alpha);

// Blocks of K exchangeable values; block means are treated as iid and get
// the normal-quantile interval. With K = 2 this matches amc_estimate.
EstimatorReport k_antithetic_estimate(
    const std::vector<std::vector<double>>& blocks, double alpha);

// (baseline CI width / candidate CI width)^2; +infinity when the candidate
// width is zero. Both reports must share the confidence level.
double relative_efficiency(const EstimatorReport& baseline,
                           const EstimatorReport& candidate);

}  // namespace noiselab
