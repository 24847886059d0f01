#include "noiselab/symmetry.hpp"

#include <cmath>
#include <stdexcept>

#include "noiselab/image_stats.hpp"

namespace noiselab {

namespace {

double trapezoid(std::span<const double> grid, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    s += 0.5 * (f[i] + f[i + 1]) * (grid[i + 1] - grid[i]);
  }
  return s;
}

struct MeanSd {
  double mean, sd;
};

MeanSd mean_sd(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  const double sd =
      v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0;
  return {m, sd};
}

}  // namespace

SliceCurve slice_curve(const ScoreField& score, int t,
                       std::span<const double> anchor, int coord,
                       int grid_size) {
  if (grid_size < 3 || grid_size % 2 == 0) {
    throw std::invalid_argument("slice_curve: grid_size must be odd and >= 3");
  }
  if (coord < 0 || coord >= score.dim()) {
    throw std::invalid_argument("slice_curve: coordinate out of range");
  }
  if (static_cast<int>(anchor.size()) != score.dim()) {
    throw std::invalid_argument("slice_curve: anchor dimension mismatch");
  }
  SliceCurve curve;
  curve.t = t;
  curve.coord = coord;
  curve.anchor.assign(anchor.begin(), anchor.end());
  curve.grid.resize(grid_size);
  curve.values.resize(grid_size);

  std::vector<double> x(anchor.size());
  std::vector<double> eps(anchor.size());
  for (int i = 0; i < grid_size; ++i) {
    const double c = -1.0 + 2.0 * i / (grid_size - 1);
    curve.grid[i] = c;
    for (std::size_t j = 0; j < anchor.size(); ++j) x[j] = c * anchor[j];
    score.eval(t, x, eps);
    curve.values[i] = eps[coord];
  }
  return curve;
}

double antisymmetry_score(const SliceCurve& curve) {
  const std::size_t n = curve.grid.size();
  const double len = curve.grid.back() - curve.grid.front();
  const double fbar = trapezoid(curve.grid, curve.values) / len;

  std::vector<double> sym(n), dev(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mirrored = curve.values[n - 1 - i];  // f(-c) by symmetry
    const double g = 0.5 * (curve.values[i] + mirrored) - fbar;
    sym[i] = g * g;
    const double h = curve.values[i] - fbar;
    dev[i] = h * h;
  }
  const double denom = trapezoid(curve.grid, dev);
  // constant up to rounding: the variance integral is pure cancellation noise
  if (denom <= 1e-26 * std::max(1.0, fbar * fbar)) {
    throw std::invalid_argument("antisymmetry_score: constant curve");
  }
  return 1.0 - trapezoid(curve.grid, sym) / denom;
}

TemporalCorrelation temporal_correlation(
    const std::vector<std::pair<Trajectory, Trajectory>>& pn_pairs) {
  if (pn_pairs.size() < 2) {
    throw std::invalid_argument("temporal_correlation: need >= 2 pairs");
  }
  const int T = pn_pairs.front().first.T;
  const int d = pn_pairs.front().first.d;
  for (const auto& [p, q] : pn_pairs) {
    if (p.T != T || q.T != T || p.d != d || q.d != d) {
      throw std::invalid_argument("temporal_correlation: mismatched schedules");
    }
    if (!p.has_eps || !q.has_eps) {
      throw std::invalid_argument("temporal_correlation: eps not recorded");
    }
  }
  const std::size_t P = pn_pairs.size();

  TemporalCorrelation out;
  out.state_mean.resize(T + 1);
  out.state_sd.resize(T + 1);
  out.state_cent_mean.resize(T + 1);
  out.state_cent_sd.resize(T + 1);
  out.eps_mean.assign(T + 1, 0.0);
  out.eps_sd.assign(T + 1, 0.0);
  out.eps_cent_mean.assign(T + 1, 0.0);
  out.eps_cent_sd.assign(T + 1, 0.0);

  std::vector<double> corrs(P), cent(P);
  std::vector<double> mu(d), ca(d), cb(d);

  auto process = [&](auto&& get_vec, int t, double& mean_out, double& sd_out,
                     double& cmean_out, double& csd_out) {
    std::fill(mu.begin(), mu.end(), 0.0);
    for (const auto& [p, q] : pn_pairs) {
      auto a = get_vec(p, t);
      auto b = get_vec(q, t);
      for (int j = 0; j < d; ++j) mu[j] += a[j] + b[j];
    }
    for (double& m : mu) m /= 2.0 * static_cast<double>(P);
    for (std::size_t i = 0; i < P; ++i) {
      auto a = get_vec(pn_pairs[i].first, t);
      auto b = get_vec(pn_pairs[i].second, t);
      corrs[i] = pearson_standard(a, b);
      for (int j = 0; j < d; ++j) {
        ca[j] = a[j] - mu[j];
        cb[j] = b[j] - mu[j];
      }
      cent[i] = pearson_standard(ca, cb);
    }
    auto ms = mean_sd(corrs);
    mean_out = ms.mean;
    sd_out = ms.sd;
    auto cs = mean_sd(cent);
    cmean_out = cs.mean;
    csd_out = cs.sd;
  };

  for (int t = 0; t <= T; ++t) {
    process([](const Trajectory& tr, int s) { return tr.state(s); }, t,
            out.state_mean[t], out.state_sd[t], out.state_cent_mean[t],
            out.state_cent_sd[t]);
  }
  for (int t = 1; t <= T; ++t) {
    process([](const Trajectory& tr, int s) { return tr.eps_at(s); }, t,
            out.eps_mean[t], out.eps_sd[t], out.eps_cent_mean[t],
            out.eps_cent_sd[t]);
  }
  return out;
}

double symmetry_center(const ScoreField& score, int t, int coord,
                       int probe_count, RngStream stream) {
  if (probe_count < 1) {
    throw std::invalid_argument("symmetry_center: probe_count >= 1");
  }
  if (coord < 0 || coord >= score.dim()) {
    throw std::invalid_argument("symmetry_center: coordinate out of range");
  }
  Rng rng(stream);
  const int d = score.dim();
  std::vector<double> x(d), nx(d), eps(d);
  double acc = 0.0;
  for (int p = 0; p < probe_count; ++p) {
    for (int j = 0; j < d; ++j) {
      x[j] = rng.normal();
      nx[j] = -x[j];
    }
    score.eval(t, x, eps);
    const double fp = eps[coord];
    score.eval(t, nx, eps);
    acc += 0.5 * (fp + eps[coord]);
  }
  return acc / probe_count;
}

}  // namespace noiselab
