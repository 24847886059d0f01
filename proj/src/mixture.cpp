#include "noiselab/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace noiselab {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;

// log responsibilities into work (size K); returns log p(x).
double log_responsibilities(const MixtureMarginal& m, std::span<const double> x,
                            std::vector<double>& work) {
  const int K = m.components();
  work.resize(K);
  double max_log = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    auto mu = m.mean(k);
    double q = 0.0;
    for (int j = 0; j < m.d; ++j) {
      const double r = x[j] - mu[j];
      q += r * r;
    }
    const double lg = std::log(m.weights[k]) -
                      0.5 * (q / m.vars[k] + m.d * (kLog2Pi + std::log(m.vars[k])));
    work[k] = lg;
    max_log = std::max(max_log, lg);
  }
  double sum = 0.0;
  for (int k = 0; k < K; ++k) sum += std::exp(work[k] - max_log);
  const double log_p = max_log + std::log(sum);
  for (int k = 0; k < K; ++k) work[k] = std::exp(work[k] - log_p);
  return log_p;
}

}  // namespace

void MixtureParams::validate() const {
  if (d < 1) throw std::invalid_argument("MixtureParams: d >= 1");
  const int K = components();
  if (K < 1) throw std::invalid_argument("MixtureParams: need a component");
  if (means.size() != static_cast<std::size_t>(K) * d ||
      sigma2.size() != static_cast<std::size_t>(K)) {
    throw std::invalid_argument("MixtureParams: inconsistent sizes");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("MixtureParams: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("MixtureParams: weights must sum to 1");
  }
  for (double s2 : sigma2) {
    if (!(s2 > 0.0)) throw std::invalid_argument("MixtureParams: sigma2 > 0");
  }
}

std::vector<double> MixtureParams::mixture_mean() const {
  std::vector<double> mu(d, 0.0);
  for (int k = 0; k < components(); ++k) {
    auto m = mean(k);
    for (int j = 0; j < d; ++j) mu[j] += weights[k] * m[j];
  }
  return mu;
}

double MixtureMarginal::log_density(std::span<const double> x) const {
  std::vector<double> work;
  return log_responsibilities(*this, x, work);
}

double MixtureMarginal::density(std::span<const double> x) const {
  return std::exp(log_density(x));
}

void MixtureMarginal::score(std::span<const double> x,
                            std::span<double> out) const {
  std::vector<double> resp;
  log_responsibilities(*this, x, resp);
  std::fill(out.begin(), out.end(), 0.0);
  for (int k = 0; k < components(); ++k) {
    auto mu = mean(k);
    const double c = resp[k] / vars[k];
    for (int j = 0; j < d; ++j) out[j] += c * (mu[j] - x[j]);
  }
}

void MixtureMarginal::log_density_hessian(std::span<const double> x,
                                          std::span<double> out) const {
  std::vector<double> resp;
  log_responsibilities(*this, x, resp);
  const int K = components();
  std::vector<double> s(d, 0.0);
  std::vector<double> u(static_cast<std::size_t>(K) * d);
  for (int k = 0; k < K; ++k) {
    auto mu = mean(k);
    for (int j = 0; j < d; ++j) {
      const double uj = (mu[j] - x[j]) / vars[k];
      u[static_cast<std::size_t>(k) * d + j] = uj;
      s[j] += resp[k] * uj;
    }
  }
  // H = sum_k r_k (u_k u_k^T - I/v_k) - s s^T
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      double h = -s[a] * s[b];
      for (int k = 0; k < K; ++k) {
        h += resp[k] * u[static_cast<std::size_t>(k) * d + a] *
             u[static_cast<std::size_t>(k) * d + b];
        if (a == b) h -= resp[k] / vars[k];
      }
      out[static_cast<std::size_t>(a) * d + b] = h;
    }
  }
}

void MixtureMarginal::sample(Rng& rng, std::span<double> out) const {
  const double u = rng.uniform01();
  double acc = 0.0;
  int pick = components() - 1;
  for (int k = 0; k < components(); ++k) {
    acc += weights[k];
    if (u <= acc) {
      pick = k;
      break;
    }
  }
  auto mu = mean(pick);
  const double sd = std::sqrt(vars[pick]);
  for (int j = 0; j < d; ++j) out[j] = mu[j] + sd * rng.normal();
}

MixtureMarginal forward_marginal(const MixtureParams& p, double alpha_bar) {
  MixtureMarginal m;
  m.d = p.d;
  m.weights = p.weights;
  m.means.resize(p.means.size());
  m.vars.resize(p.sigma2.size());
  const double root = std::sqrt(alpha_bar);
  for (std::size_t i = 0; i < p.means.size(); ++i) m.means[i] = root * p.means[i];
  for (std::size_t k = 0; k < p.sigma2.size(); ++k) {
    m.vars[k] = alpha_bar * p.sigma2[k] + (1.0 - alpha_bar);
  }
  return m;
}

MixtureMarginal ou_marginal(const MixtureParams& p, double t) {
  const double decay = std::exp(-t);
  MixtureMarginal m;
  m.d = p.d;
  m.weights = p.weights;
  m.means.resize(p.means.size());
  m.vars.resize(p.sigma2.size());
  for (std::size_t i = 0; i < p.means.size(); ++i) m.means[i] = decay * p.means[i];
  for (std::size_t k = 0; k < p.sigma2.size(); ++k) {
    m.vars[k] = decay * decay * p.sigma2[k] + (1.0 - decay * decay);
  }
  return m;
}

MixtureScoreField::MixtureScoreField(MixtureParams params, Schedule schedule)
    : params_(std::move(params)), schedule_(std::move(schedule)) {
  params_.validate();
  marginals_.reserve(schedule_.alpha_bar.size());
  for (double ab : schedule_.alpha_bar) {
    marginals_.push_back(forward_marginal(params_, ab));
  }
}

void MixtureScoreField::eval(int t, std::span<const double> x,
                             std::span<double> eps_out) const {
  marginals_[t].score(x, eps_out);
  const double c = -std::sqrt(1.0 - schedule_.alpha_bar[t]);
  for (auto& v : eps_out) v *= c;
}

std::vector<double> exact_mixture_eps(const MixtureParams& params,
                                      const Schedule& schedule, int t,
                                      std::span<const double> x) {
  if (t < 1 || t > schedule.steps()) {
    throw std::invalid_argument("exact_mixture_eps: t outside [1, T]");
  }
  const MixtureMarginal m = forward_marginal(params, schedule.alpha_bar[t]);
  std::vector<double> eps(params.d);
  m.score(x, eps);
  const double c = -std::sqrt(1.0 - schedule.alpha_bar[t]);
  for (double& v : eps) v *= c;
  return eps;
}

}  // namespace noiselab
