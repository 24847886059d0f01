#include "noiselab/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "noiselab/quantiles.hpp"

namespace noiselab {

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("confidence level: alpha must lie in (0,1)");
  }
}

}  // namespace

std::string EstimatorReport::to_json() const {
  nlohmann::json j{{"estimate", estimate},
                   {"ci_lo", ci_lo},
                   {"ci_hi", ci_hi},
                   {"half_width", half_width},
                   {"variance_estimate", variance_estimate},
                   {"method", method},
                   {"sample_budget", sample_budget},
                   {"confidence", confidence}};
  if (rho_hat) j["rho_hat"] = *rho_hat;
  return j.dump();
}

EstimatorReport mc_estimate(std::span<const double> values, double alpha) {
  check_alpha(alpha);
  const std::size_t n = values.size();
  if (n < 2) {
    throw std::invalid_argument("mc_estimate: need N >= 2 to form a variance");
  }
  const double mu = mean_of(values);
  const double var = sample_variance(values, mu);
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double half = z * std::sqrt(var / static_cast<double>(n));

  EstimatorReport r;
  r.estimate = mu;
  r.ci_lo = mu - half;
  r.ci_hi = mu + half;
  r.half_width = half;
  r.variance_estimate = var;
  r.method = "mc";
  r.sample_budget = static_cast<std::int64_t>(n);
  r.confidence = 1.0 - alpha;
  return r;
}

EstimatorReport amc_estimate(std::span<const std::pair<double, double>> pairs,
                             double alpha) {
  check_alpha(alpha);
  const std::size_t K = pairs.size();
  if (K < 2) throw std::invalid_argument("amc_estimate: need K >= 2 pairs");

  std::vector<double> pair_means(K);
  for (std::size_t i = 0; i < K; ++i) {
    pair_means[i] = 0.5 * (pairs[i].first + pairs[i].second);
  }
  const double mu = mean_of(pair_means);
  const double var = sample_variance(pair_means, mu);
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const std::size_t N = 2 * K;
  const double half = z * std::sqrt(2.0 * var / static_cast<double>(N));

  // Correlation of the margins; undefined when either margin is constant.
  double mp = 0.0, mm = 0.0;
  for (const auto& [sp, sm] : pairs) {
    mp += sp;
    mm += sm;
  }
  mp /= static_cast<double>(K);
  mm /= static_cast<double>(K);
  double spp = 0.0, smm = 0.0, spm = 0.0;
  for (const auto& [sp, sm] : pairs) {
    spp += (sp - mp) * (sp - mp);
    smm += (sm - mm) * (sm - mm);
    spm += (sp - mp) * (sm - mm);
  }
  std::optional<double> rho;
  if (spp > 0.0 && smm > 0.0) rho = spm / std::sqrt(spp * smm);

  EstimatorReport r;
  r.estimate = mu;
  r.ci_lo = mu - half;
  r.ci_hi = mu + half;
  r.half_width = half;
  r.variance_estimate = var;
  r.rho_hat = rho;
  r.method = "amc";
  r.sample_budget = static_cast<std::int64_t>(N);
  r.confidence = 1.0 - alpha;
  return r;
}

EstimatorReport rqmc_estimate(std::span<const double> replicate_means,
                              double alpha) {
  check_alpha(alpha);
  const std::size_t R = replicate_means.size();
  if (R < 2) {
    throw std::invalid_argument("rqmc_estimate: need R >= 2 replicates");
  }
  const double mu = mean_of(replicate_means);
  const double var = sample_variance(replicate_means, mu);
  const double tq =
      student_t_quantile(static_cast<double>(R - 1), 1.0 - alpha / 2.0);
  const double half = tq * std::sqrt(var / static_cast<double>(R));

  EstimatorReport r;
  r.estimate = mu;
  r.ci_lo = mu - half;
  r.ci_hi = mu + half;
  r.half_width = half;
  r.variance_estimate = var;
  r.method = "rqmc";
  r.sample_budget = static_cast<std::int64_t>(R);
  r.confidence = 1.0 - alpha;
  return r;
}

EstimatorReport k_antithetic_estimate(
    const std::vector<std::vector<double>>& blocks, double alpha) {
  check_alpha(alpha);
  if (blocks.size() < 2) {
    throw std::invalid_argument("k_antithetic_estimate: need >= 2 blocks");
  }
  const std::size_t K = blocks.front().size();
  if (K < 2) {
    throw std::invalid_argument("k_antithetic_estimate: block size >= 2");
  }
  for (const auto& b : blocks) {
    if (b.size() != K) {
      throw std::invalid_argument("k_antithetic_estimate: ragged blocks");
    }
  }
  if (K == 2) {
    std::vector<std::pair<double, double>> pairs(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      pairs[i] = {blocks[i][0], blocks[i][1]};
    }
    EstimatorReport r = amc_estimate(pairs, alpha);
    r.method = "k_antithetic";
    return r;
  }

  std::vector<double> block_means(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    block_means[i] = mean_of(blocks[i]);
  }
  const double mu = mean_of(block_means);
  const double var = sample_variance(block_means, mu);
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double half = z * std::sqrt(var / static_cast<double>(blocks.size()));

  EstimatorReport r;
  r.estimate = mu;
  r.ci_lo = mu - half;
  r.ci_hi = mu + half;
  r.half_width = half;
  r.variance_estimate = var;
  r.method = "k_antithetic";
  r.sample_budget = static_cast<std::int64_t>(blocks.size() * K);
  r.confidence = 1.0 - alpha;
  return r;
}

double relative_efficiency(const EstimatorReport& baseline,
                           const EstimatorReport& candidate) {
  if (std::abs(baseline.confidence - candidate.confidence) > 1e-12) {
    throw std::invalid_argument(
        "relative_efficiency: confidence levels differ");
  }
  const double wb = baseline.ci_hi - baseline.ci_lo;
  const double wc = candidate.ci_hi - candidate.ci_lo;
  if (wc == 0.0) return std::numeric_limits<double>::infinity();
  const double ratio = wb / wc;
  return ratio * ratio;
}

}  // namespace noiselab
