#include "noiselab/ou.hpp"

#include <cmath>
#include <stdexcept>

#include "noiselab/image_stats.hpp"

namespace noiselab {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] (Newton on the recurrence).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

struct CompositeRule {
  std::vector<double> nodes, weights;
};

CompositeRule composite_gl(double lo, double hi, int panels, int order) {
  std::vector<double> gx, gw;
  gauss_legendre(order, gx, gw);
  CompositeRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * order);
  rule.weights.reserve(static_cast<std::size_t>(panels) * order);
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    for (int k = 0; k < order; ++k) {
      rule.nodes.push_back(a + 0.5 * h * (gx[k] + 1.0));
      rule.weights.push_back(0.5 * h * gw[k]);
    }
  }
  return rule;
}

}  // namespace

DensityWithScore density_from_marginal(const MixtureMarginal& m) {
  DensityWithScore d;
  d.dim = m.d;
  d.pdf = [m](std::span<const double> x) { return m.density(x); };
  d.score = [m](std::span<const double> x, std::span<double> out) {
    m.score(x, out);
  };
  return d;
}

double relative_fisher_information(const DensityWithScore& p,
                                   const FiOptions& opts) {
  if (p.dim != 1 && p.dim != 2) {
    throw std::invalid_argument(
        "relative_fisher_information: dim must be 1 or 2");
  }
  const CompositeRule rule =
      composite_gl(opts.lo, opts.hi, opts.panels, opts.points_per_panel);

  double mass = 0.0, fi = 0.0;
  if (p.dim == 1) {
    double xv[1], sv[1];
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      xv[0] = rule.nodes[i];
      const double w = rule.weights[i];
      const double pd = p.pdf(std::span<const double>(xv, 1));
      mass += w * pd;
      p.score(std::span<const double>(xv, 1), std::span<double>(sv, 1));
      const double g = sv[0] + xv[0];
      fi += w * pd * g * g;
    }
  } else {
    double xv[2], sv[2];
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        xv[0] = rule.nodes[i];
        xv[1] = rule.nodes[j];
        const double w = rule.weights[i] * rule.weights[j];
        const double pd = p.pdf(std::span<const double>(xv, 2));
        mass += w * pd;
        p.score(std::span<const double>(xv, 2), std::span<double>(sv, 2));
        const double g0 = sv[0] + xv[0];
        const double g1 = sv[1] + xv[1];
        fi += w * pd * (g0 * g0 + g1 * g1);
      }
    }
  }
  if (std::abs(mass - 1.0) > opts.mass_tolerance) {
    throw std::invalid_argument(
        "relative_fisher_information: density mass deviates from 1 (got " +
        std::to_string(mass) + ")");
  }
  return fi;
}

double relative_fisher_information(const MixtureMarginal& m,
                                   const FiOptions& opts) {
  return relative_fisher_information(density_from_marginal(m), opts);
}

SymmetryCheckReport symmetry_preservation_check(
    const MixtureParams& mixture, std::span<const double> g,
    std::span<const double> t_grid, int probe_count, RngStream stream,
    bool require_symmetric) {
  mixture.validate();
  const int d = mixture.d;
  if (static_cast<int>(g.size()) != d * d) {
    throw std::invalid_argument("symmetry_preservation_check: g must be dxd");
  }
  // orthogonality: g g^T = I
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += g[i * d + k] * g[j * d + k];
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-10) {
        throw std::invalid_argument(
            "symmetry_preservation_check: g is not orthogonal");
      }
    }
  }
  const std::vector<double> mu = mixture.mixture_mean();

  auto apply_g = [&](std::span<const double> x, std::span<double> out) {
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += g[i * d + j] * x[j];
      out[i] = s;
    }
  };

  if (require_symmetric) {
    // Every component reflected about mu must coincide with a component of
    // equal weight and variance.
    std::vector<double> rm(d);
    for (int k = 0; k < mixture.components(); ++k) {
      auto mk = mixture.mean(k);
      std::vector<double> centered(d);
      for (int j = 0; j < d; ++j) centered[j] = mk[j] - mu[j];
      apply_g(centered, rm);
      for (int j = 0; j < d; ++j) rm[j] += mu[j];
      bool found = false;
      for (int l = 0; l < mixture.components() && !found; ++l) {
        auto ml = mixture.mean(l);
        double dist = 0.0;
        for (int j = 0; j < d; ++j) dist += std::abs(ml[j] - rm[j]);
        found = dist < 1e-10 &&
                std::abs(mixture.weights[l] - mixture.weights[k]) < 1e-12 &&
                std::abs(mixture.sigma2[l] - mixture.sigma2[k]) < 1e-12;
      }
      if (!found) {
        throw std::invalid_argument(
            "symmetry_preservation_check: mixture is not symmetric under g");
      }
    }
  }

  Rng rng(stream);
  SymmetryCheckReport report;
  std::vector<double> x(d), gx(d), xs(d), gxs(d), s1(d), s2(d), gs(d);
  for (double t : t_grid) {
    const MixtureMarginal marginal = ou_marginal(mixture, t);
    const double decay = std::exp(-t);
    for (int p = 0; p < probe_count; ++p) {
      for (int j = 0; j < d; ++j) x[j] = rng.normal();
      apply_g(x, gx);
      for (int j = 0; j < d; ++j) {
        xs[j] = decay * mu[j] + x[j];
        gxs[j] = decay * mu[j] + gx[j];
      }
      const double dens_res =
          std::abs(marginal.density(gxs) - marginal.density(xs));
      report.max_density_residual =
          std::max(report.max_density_residual, dens_res);

      marginal.score(gxs, s1);
      marginal.score(xs, s2);
      apply_g(s2, gs);
      double score_res = 0.0;
      for (int j = 0; j < d; ++j) {
        score_res += (s1[j] - gs[j]) * (s1[j] - gs[j]);
      }
      report.max_score_residual =
          std::max(report.max_score_residual, std::sqrt(score_res));
    }
  }
  return report;
}

OneStepBoundReport one_step_ddim_correlation_bound(double shift, double ou_t,
                                                   double a_t, double b_t,
                                                   int sample_count,
                                                   RngStream stream) {
  if (sample_count < 2) {
    throw std::invalid_argument(
        "one_step_ddim_correlation_bound: need >= 2 samples");
  }
  const double decay = std::exp(-ou_t);
  const double mean_t = decay * shift;  // mu_t = N(e^{-t} m, 1)
  // F(x) = a x + b s_t(x) with s_t(x) = -(x - mean_t)
  auto F = [&](double x) { return (a_t - b_t) * x + b_t * mean_t; };

  Rng rng(stream);
  std::vector<double> fp(sample_count), fm(sample_count);
  for (int i = 0; i < sample_count; ++i) {
    const double x = mean_t + rng.normal();
    fp[i] = F(x);
    fm[i] = F(-x);
  }
  OneStepBoundReport r;
  r.measured_corr = pearson_standard(fp, fm);
  r.measured_gap = std::abs(r.measured_corr + 1.0);
  r.map_variance = (a_t - b_t) * (a_t - b_t);
  const double fi0 = shift * shift;
  r.bound = 2.0 * std::abs(b_t) * decay * std::sqrt(fi0) /
            std::sqrt(r.map_variance);
  r.ratio = r.bound > 0.0 ? r.measured_gap / r.bound : 0.0;
  return r;
}

}  // namespace noiselab
