#include "noiselab/fkg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "noiselab/sampler.hpp"

namespace noiselab {

namespace {

// Pearson correlation with delete-1 jackknife standard error, from centered
// sufficient statistics. Throws when either margin is constant.
CorrEstimate corr_with_jackknife(std::span<const double> x,
                                 std::span<const double> y) {
  const std::size_t n = x.size();
  bool const_x = true, const_y = true;
  for (std::size_t i = 1; i < n && (const_x || const_y); ++i) {
    const_x &= (x[i] == x[0]);
    const_y &= (y[i] == y[0]);
  }
  if (const_x || const_y) {
    throw std::domain_error("correlation undefined: constant margin");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x[i] - mx;
    const double b = y[i] - my;
    saa += a * a;
    sbb += b * b;
    sab += a * b;
  }
  // Constant margins leave only mean-subtraction rounding noise behind, so
  // the cutoff must sit above that noise floor, not at zero.
  const double floor_a = n * 1e-24 * (1.0 + mx * mx);
  const double floor_b = n * 1e-24 * (1.0 + my * my);
  if (saa <= floor_a || sbb <= floor_b) {
    throw std::domain_error("correlation undefined: constant margin");
  }
  CorrEstimate est;
  est.rho = sab / std::sqrt(saa * sbb);

  // Leave-one-out: S_{-i} = S - (n/(n-1)) * (contribution of i).
  const double c = static_cast<double>(n) / static_cast<double>(n - 1);
  std::vector<double> loo(n);
  double loo_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x[i] - mx;
    const double b = y[i] - my;
    const double va = saa - c * a * a;
    const double vb = sbb - c * b * b;
    const double cov = sab - c * a * b;
    loo[i] = (va > 0.0 && vb > 0.0) ? cov / std::sqrt(va * vb) : est.rho;
    loo_mean += loo[i];
  }
  loo_mean /= static_cast<double>(n);
  double s = 0.0;
  for (double r : loo) s += (r - loo_mean) * (r - loo_mean);
  est.std_error = std::sqrt(s * static_cast<double>(n - 1) /
                            static_cast<double>(n));
  return est;
}

}  // namespace

double MonotoneChain::operator()(double x) const {
  double h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    h = std::max(0.0, weights[l] * h + biases[l]);
  }
  return h;
}

MonotoneChain build_random_chain(RngStream stream, int depth,
                                 double weight_scale) {
  if (depth < 1) throw std::invalid_argument("build_random_chain: depth >= 1");
  Rng rng(stream);
  MonotoneChain chain;
  chain.weights.resize(depth);
  chain.biases.resize(depth);
  for (int l = 0; l < depth; ++l) {
    chain.weights[l] = weight_scale * rng.normal();
    chain.biases[l] = 0.7 * rng.normal();
  }
  return chain;
}

CorrEstimate antithetic_corr(const std::function<double(double)>& f, int n,
                             RngStream stream) {
  if (n < 1000) throw std::invalid_argument("antithetic_corr: n >= 1000");
  Rng rng(stream);
  std::vector<double> fp(n), fm(n);
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    fp[i] = f(z);
    fm[i] = f(-z);
  }
  return corr_with_jackknife(fp, fm);
}

CorrEstimate partial_monotone_corr(const PartialMonotoneMap& map,
                                   std::span<const double> s_weights, int n,
                                   RngStream stream) {
  if (n < 1000) throw std::invalid_argument("partial_monotone_corr: n >= 1000");
  if (static_cast<int>(s_weights.size()) != map.out_dim) {
    throw std::invalid_argument("partial_monotone_corr: statistic size");
  }
  if (static_cast<int>(map.input_signs.size()) != map.in_dim) {
    throw std::invalid_argument("partial_monotone_corr: sign vector size");
  }
  Rng rng(stream);
  std::vector<double> z(map.in_dim), out(map.out_dim);
  std::vector<double> fp(n), fm(n);
  for (int i = 0; i < n; ++i) {
    for (double& v : z) v = rng.normal();
    map.eval(z, out);
    double s = 0.0;
    for (int j = 0; j < map.out_dim; ++j) s += s_weights[j] * out[j];
    fp[i] = s;
    for (double& v : z) v = -v;
    map.eval(z, out);
    s = 0.0;
    for (int j = 0; j < map.out_dim; ++j) s += s_weights[j] * out[j];
    fm[i] = s;
  }
  return corr_with_jackknife(fp, fm);
}

MonotonicityReport ddim_monotonicity_check(const MixtureParams& mixture,
                                           const Schedule& schedule, int t,
                                           int probe_count, RngStream stream,
                                           double score_scale) {
  mixture.validate();
  if (t < 1 || t > schedule.steps()) {
    throw std::invalid_argument("ddim_monotonicity_check: t outside [1, T]");
  }
  const int d = mixture.d;
  const MixtureMarginal marginal =
      forward_marginal(mixture, schedule.alpha_bar[t]);

  MonotonicityReport report;
  report.t = t;
  report.a = schedule.a(t);
  report.c = score_scale * schedule.score_coeff(t);
  report.kappa = -std::numeric_limits<double>::infinity();
  report.min_offdiagonal = std::numeric_limits<double>::infinity();
  report.min_jacobian_entry = std::numeric_limits<double>::infinity();

  const MixtureScoreField field(mixture, schedule);
  Rng rng(stream);
  std::vector<double> x(d), hess(static_cast<std::size_t>(d) * d);
  std::vector<double> xp(d), xm(d), ep(d), em(d);
  for (int p = 0; p < probe_count; ++p) {
    marginal.sample(rng, x);
    marginal.log_density_hessian(x, hess);
    for (int i = 0; i < d; ++i) {
      report.kappa = std::max(report.kappa, -hess[i * d + i]);
      for (int j = 0; j < d; ++j) {
        if (i != j) {
          report.min_offdiagonal =
              std::min(report.min_offdiagonal, hess[i * d + j]);
        }
      }
    }

    // Central-difference Jacobian of y -> a y + b eps(t, y); independent of
    // the analytic Hessian route above.
    double norm = 0.0;
    for (double v : x) norm += v * v;
    const double h = 1e-5 * (1.0 + std::sqrt(norm));
    const double a = schedule.a(t);
    const double b = score_scale * schedule.b(t);
    for (int j = 0; j < d; ++j) {
      std::copy(x.begin(), x.end(), xp.begin());
      std::copy(x.begin(), x.end(), xm.begin());
      xp[j] += h;
      xm[j] -= h;
      field.eval(t, xp, ep);
      field.eval(t, xm, em);
      for (int i = 0; i < d; ++i) {
        double entry = b * (ep[i] - em[i]) / (2.0 * h);
        if (i == j) entry += a;
        report.min_jacobian_entry = std::min(report.min_jacobian_entry, entry);
      }
    }
  }
  if (d == 1) report.min_offdiagonal = 0.0;
  report.condition_holds = report.a >= report.c * report.kappa;
  return report;
}

ChainMonotonicityReport ddim_chain_monotonicity_check(
    const MixtureParams& mixture, const Schedule& schedule, int probe_count,
    RngStream stream) {
  ChainMonotonicityReport out;
  out.condition_holds_everywhere = true;
  for (int t = 1; t <= schedule.steps(); ++t) {
    out.steps.push_back(ddim_monotonicity_check(mixture, schedule, t,
                                                probe_count,
                                                stream.child(1000 + t)));
    out.condition_holds_everywhere &= out.steps.back().condition_holds;
  }

  const int d = mixture.d;
  const MixtureScoreField field(mixture, schedule);
  Rng rng(stream.child(1));
  out.min_composed_jacobian_entry = std::numeric_limits<double>::infinity();
  std::vector<double> z(d), zp(d), zm(d);
  for (int p = 0; p < probe_count; ++p) {
    for (double& v : z) v = rng.normal();
    double norm = 0.0;
    for (double v : z) norm += v * v;
    const double h = 1e-5 * (1.0 + std::sqrt(norm));
    for (int j = 0; j < d; ++j) {
      std::copy(z.begin(), z.end(), zp.begin());
      std::copy(z.begin(), z.end(), zm.begin());
      zp[j] += h;
      zm[j] -= h;
      const Trajectory tp = ddim_sample(field, schedule, zp, false);
      const Trajectory tm = ddim_sample(field, schedule, zm, false);
      for (int i = 0; i < d; ++i) {
        const double entry = (tp.output()[i] - tm.output()[i]) / (2.0 * h);
        out.min_composed_jacobian_entry =
            std::min(out.min_composed_jacobian_entry, entry);
      }
    }
  }
  return out;
}

}  // namespace noiselab
