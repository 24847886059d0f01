// Acceptance suite: runs every top-level criterion at its stated budget and
// tolerance and prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "noiselab/estimators.hpp"
#include "noiselab/fkg.hpp"
#include "noiselab/harness.hpp"
#include "noiselab/hermite.hpp"
#include "noiselab/image_stats.hpp"
#include "noiselab/mixture.hpp"
#include "noiselab/noise.hpp"
#include "noiselab/ou.hpp"
#include "noiselab/parallel.hpp"
#include "noiselab/sampler.hpp"
#include "noiselab/schedule.hpp"
#include "noiselab/sobol.hpp"
#include "noiselab/symmetry.hpp"
#include "test_support.hpp"

using namespace noiselab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double elapsed_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

ImageTensor to_image(std::span<const double> y, int C, int H, int W) {
  ImageTensor img(C, H, W);
  for (std::size_t i = 0; i < y.size(); ++i) {
    img.v[i] = std::clamp(0.5 * (y[i] + 1.0), 0.0, 1.0);
  }
  return img;
}

// --------------------------------------------------------------------------
// 1. Exact antithetic cancellation through the deterministic sampler.

Outcome criterion1() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();

  const int d = 64;
  const std::int64_t pairs = 1000;
  const Schedule schedule = linear_beta_schedule(50, 1e-4, 0.02);
  MixtureParams p;
  p.d = d;
  p.weights = {1.0};
  p.sigma2 = {1.0};
  p.means.assign(d, 0.0);
  const MixtureScoreField field(p, schedule);

  NoiseBatch pn = antithetic_expand(gaussian_batch(RngStream{101, 1}, pairs, d));
  const auto outputs =
      ddim_output_batch(field, schedule, pn, ExecPolicy::openmp);

  std::vector<std::pair<std::vector<double>, std::vector<double>>> img_pairs;
  img_pairs.reserve(pairs);
  std::vector<std::pair<double, double>> mean_pixels;
  for (std::int64_t i = 0; i < pairs; ++i) {
    const ImageTensor a =
        to_image({outputs.data() + (2 * i) * d, (std::size_t)d}, 1, 8, 8);
    const ImageTensor b =
        to_image({outputs.data() + (2 * i + 1) * d, (std::size_t)d}, 1, 8, 8);
    mean_pixels.emplace_back(mean_pixel(a), mean_pixel(b));
    img_pairs.emplace_back(a.v, b.v);
  }
  const auto cors = pearson_centralized(img_pairs);
  double worst = 0.0;
  for (double c : cors) worst = std::max(worst, std::abs(c + 1.0));
  out.require(worst <= 1e-6,
              "per-pair centralized correlation off -1 by " + fmt(worst));

  const EstimatorReport amc = amc_estimate(mean_pixels, 0.05);
  const double width = amc.ci_hi - amc.ci_lo;
  out.require(width <= 1e-10, "AMC mean-pixel CI width " + fmt(width));

  const double secs = elapsed_seconds(t0);
  out.require(secs < 10.0, "runtime " + fmt(secs) + "s");
  out.note("max |corr+1| = " + fmt(worst) + ", width = " + fmt(width) +
           ", " + fmt(secs) + "s");
  return out;
}

// --------------------------------------------------------------------------
// 2. AMC variance law and coverage on synthetic bivariate-normal pairs.

Outcome criterion2() {
  Outcome out;
  const int macro = 10000, K = 100;
  const double mu = 1.0;
  for (double rho : {-0.9, -0.5, 0.0, 0.5}) {
    std::vector<double> amc_means(macro), mc_means(macro);
    std::vector<int> covered(macro, 0);
    parallel_for(macro, ExecPolicy::openmp, [&](std::size_t m) {
      Rng rng(RngStream{202, 1000 * (std::uint64_t)(10 * (rho + 1)) + m});
      std::vector<std::pair<double, double>> prs(K);
      double mc_sum = 0.0;
      for (int i = 0; i < K; ++i) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        prs[i] = {mu + z1, mu + rho * z1 + std::sqrt(1 - rho * rho) * z2};
        mc_sum += rng.normal() + rng.normal();
      }
      const EstimatorReport rep = amc_estimate(prs, 0.05);
      amc_means[m] = rep.estimate;
      mc_means[m] = mu + mc_sum / (2.0 * K);
      covered[m] = (rep.ci_lo <= mu && mu <= rep.ci_hi);
    });
    const double ratio = testsupport::naive_variance(amc_means) /
                         testsupport::naive_variance(mc_means);
    const double target = 1.0 + rho;
    out.require(std::abs(ratio - target) <= 0.1 * target + 1e-12,
                "rho=" + fmt(rho) + ": var ratio " + fmt(ratio) + " vs " +
                    fmt(target));
    double cov = 0.0;
    for (int c : covered) cov += c;
    cov /= macro;
    out.require(std::abs(cov - 0.95) <= 0.015,
                "rho=" + fmt(rho) + ": coverage " + fmt(cov));
    out.note("rho=" + fmt(rho) + ": ratio " + fmt(ratio) + ", coverage " +
             fmt(cov));
  }
  return out;
}

// --------------------------------------------------------------------------
// 3. K-antithetic pairwise correlation and exact block sums.

Outcome criterion3() {
  Outcome out;
  const std::int64_t blocks = 100000;
  for (int K : {2, 4, 8}) {
    const NoiseBatch b =
        k_antithetic_batch(RngStream{303, (std::uint64_t)K}, K, 1, blocks);
    double worst_sum = 0.0;
    std::vector<double> xs, ys;
    xs.reserve(blocks * K * (K - 1));
    ys.reserve(blocks * K * (K - 1));
    for (std::int64_t bl = 0; bl < blocks; ++bl) {
      double sum = 0.0;
      for (int i = 0; i < K; ++i) sum += b.at(bl * K + i, 0);
      worst_sum = std::max(worst_sum, std::abs(sum));
      for (int i = 0; i < K; ++i) {
        for (int j = 0; j < K; ++j) {
          if (i == j) continue;
          xs.push_back(b.at(bl * K + i, 0));
          ys.push_back(b.at(bl * K + j, 0));
        }
      }
    }
    const double rho = testsupport::naive_pearson(xs, ys);
    const double target = -1.0 / (K - 1);
    out.require(std::abs(rho - target) <= 0.02,
                "K=" + std::to_string(K) + ": pairwise corr " + fmt(rho));
    out.require(worst_sum <= 1e-12,
                "K=" + std::to_string(K) + ": block sum " + fmt(worst_sum));
    out.note("K=" + std::to_string(K) + ": corr " + fmt(rho) + " (target " +
             fmt(target) + "), max |block sum| " + fmt(worst_sum));
  }
  return out;
}

// --------------------------------------------------------------------------
// 4. Efficiency arithmetic anchored to the published table entry.

Outcome criterion4() {
  Outcome out;
  EstimatorReport mc, amc;
  mc.confidence = amc.confidence = 0.95;
  mc.ci_lo = 0.0;
  mc.ci_hi = 2.00;
  amc.ci_lo = 0.0;
  amc.ci_hi = 0.35;
  const double eff = relative_efficiency(mc, amc);
  out.require(std::abs(eff - 32.65) <= 0.05, "efficiency " + fmt(eff));
  out.note("(2.00/0.35)^2 = " + fmt(eff));
  return out;
}

// --------------------------------------------------------------------------
// 5. RQMC convergence rate and Student-t coverage.

Outcome criterion5() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();

  auto integrand = [](const double* u) {
    double p = 1.0;
    for (int j = 0; j < 4; ++j) {
      const double c = u[j] - 0.5;
      p *= 1.0 + c * c * c;  // product of univariate cubics, mean 1
    }
    return p;
  };

  const int R = 32;
  std::vector<double> log_n, log_sd_q, log_sd_mc;
  Rng mc_rng(RngStream{505, 0});
  for (int m = 4; m <= 12; ++m) {
    const std::int64_t n = std::int64_t(1) << m;
    const SobolSet raw = sobol_points(4, n);
    std::vector<double> qmeans(R), mcmeans(R);
    parallel_for(R, ExecPolicy::openmp, [&](std::size_t r) {
      const SobolSet q = randomize(raw, Randomization::owen_scramble,
                                   900000ull + 100ull * m + r);
      double s = 0.0;
      double buf[4];
      for (std::int64_t i = 0; i < n; ++i) {
        for (int j = 0; j < 4; ++j) buf[j] = q.at(i, j);
        s += integrand(buf);
      }
      qmeans[r] = s / static_cast<double>(n);
    });
    for (int r = 0; r < R; ++r) {
      double s = 0.0;
      double buf[4];
      for (std::int64_t i = 0; i < n; ++i) {
        for (double& v : buf) v = mc_rng.uniform01();
        s += integrand(buf);
      }
      mcmeans[r] = s / static_cast<double>(n);
    }
    log_n.push_back(m);
    log_sd_q.push_back(std::log2(std::sqrt(testsupport::naive_variance(qmeans))));
    log_sd_mc.push_back(
        std::log2(std::sqrt(testsupport::naive_variance(mcmeans))));
  }
  const double slope_q = testsupport::fit_slope(log_n, log_sd_q);
  const double slope_mc = testsupport::fit_slope(log_n, log_sd_mc);
  out.require(slope_q <= -0.8, "RQMC slope " + fmt(slope_q));
  out.require(std::abs(slope_mc + 0.5) <= 0.1, "MC slope " + fmt(slope_mc));

  // Student-t CI coverage at (R=32, n=64), true mean 1
  const int macro = 1000;
  const SobolSet raw64 = sobol_points(4, 64);
  std::vector<int> covered(macro, 0);
  parallel_for(macro, ExecPolicy::openmp, [&](std::size_t m) {
    std::vector<double> means(R);
    for (int r = 0; r < R; ++r) {
      const SobolSet q = randomize(raw64, Randomization::owen_scramble,
                                   7000000ull + 64ull * m + r);
      double s = 0.0;
      double buf[4];
      for (std::int64_t i = 0; i < 64; ++i) {
        for (int j = 0; j < 4; ++j) buf[j] = q.at(i, j);
        s += integrand(buf);
      }
      means[r] = s / 64.0;
    }
    const EstimatorReport rep = rqmc_estimate(means, 0.05);
    covered[m] = (rep.ci_lo <= 1.0 && 1.0 <= rep.ci_hi);
  });
  double cov = 0.0;
  for (int c : covered) cov += c;
  cov /= macro;
  out.require(cov >= 0.93, "t-CI coverage " + fmt(cov));

  const double secs = elapsed_seconds(t0);
  out.require(secs < 60.0, "runtime " + fmt(secs) + "s");
  out.note("slopes rqmc " + fmt(slope_q) + " / mc " + fmt(slope_mc) +
           ", coverage " + fmt(cov) + ", " + fmt(secs) + "s");
  return out;
}

// --------------------------------------------------------------------------
// 6. Fisher-information decay.

Outcome criterion6() {
  Outcome out;
  MixtureParams shifted;
  shifted.d = 1;
  shifted.weights = {1.0};
  shifted.sigma2 = {1.0};
  shifted.means = {2.0};
  double worst = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double t = 0.1 * i;
    const double fi = relative_fisher_information(ou_marginal(shifted, t));
    worst = std::max(worst, std::abs(fi - 4.0 * std::exp(-2.0 * t)));
  }
  out.require(worst <= 1e-6, "N(2,1) FI error " + fmt(worst));

  MixtureParams bimodal;
  bimodal.d = 1;
  bimodal.weights = {0.5, 0.5};
  bimodal.sigma2 = {0.25, 0.25};
  bimodal.means = {1.5, -1.5};
  const double fi0 = relative_fisher_information(ou_marginal(bimodal, 0.0));
  double prev = fi0;
  bool monotone = true, bounded = true;
  for (int i = 1; i <= 20; ++i) {
    const double t = 0.1 * i;
    const double fi = relative_fisher_information(ou_marginal(bimodal, t));
    monotone &= (fi <= prev * (1.0 + 1e-9));
    bounded &= (fi <= std::exp(-2.0 * t) * fi0 * (1.0 + 1e-6));
    prev = fi;
  }
  out.require(monotone, "bimodal FI not nonincreasing");
  out.require(bounded, "bimodal FI exceeds the e^{-2t} bound");
  out.note("max shifted-gaussian error " + fmt(worst));
  return out;
}

// --------------------------------------------------------------------------
// 7. Hermite spectral identities.

Outcome criterion7() {
  Outcome out;
  // orthogonality at order 16
  double worst_orth = 0.0;
  double fact_n = 1.0;
  for (int n = 0; n <= 10; ++n) {
    if (n > 0) fact_n *= n;
    for (int m = 0; m <= 10; ++m) {
      const double inner = gauss_hermite_inner(
          [n](double x) { return hermite_eval(n, x); },
          [m](double x) { return hermite_eval(m, x); }, 16);
      worst_orth =
          std::max(worst_orth, std::abs(inner - (n == m ? fact_n : 0.0)));
    }
  }
  out.require(worst_orth <= 1e-8, "orthogonality error " + fmt(worst_orth));

  // semigroup damping vs kernel-convolution quadrature, degree <= 10
  HermiteExpansion e;
  e.dim = 1;
  e.max_degree = 10;
  std::vector<double> base{1.0, 0.8, -0.4, 0.25, 0.1, -0.35,
                           0.05, 0.02, -0.01, 0.03, -0.007};
  for (int n = 0; n <= 10; ++n) e.coeffs[{n}] = base[n];
  const double t = 0.5;
  const double decay = std::exp(-t);
  const double spread = std::sqrt(1.0 - decay * decay);
  GaussHermiteRule rule(48);
  auto f = [&](double x) {
    double s = 0.0;
    for (int n = 0; n <= 10; ++n) s += base[n] * hermite_eval(n, x);
    return s;
  };
  auto ptf = [&](double x) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      s += rule.weights[i] * f(decay * x + spread * rule.nodes[i]);
    }
    return s;
  };
  const HermiteExpansion damped = semigroup_apply(e, t);
  double worst_semi = 0.0;
  double fact = 1.0;
  for (int n = 0; n <= 10; ++n) {
    if (n > 0) fact *= n;
    double proj = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      proj += rule.weights[i] * ptf(rule.nodes[i]) *
              hermite_eval(n, rule.nodes[i]);
    }
    proj /= fact;
    worst_semi = std::max(worst_semi, std::abs(proj - damped.coefficient({n})));
  }
  out.require(worst_semi <= 1e-6, "semigroup mismatch " + fmt(worst_semi));

  // density-ratio norm decay, step ratio bounded by e^{-dt}
  bool monotone = true, rate_ok = true;
  const double dt = 0.15;
  double prev = density_ratio_norm(e, 0.0);
  for (int i = 1; i <= 20; ++i) {
    const double cur = density_ratio_norm(e, dt * i);
    monotone &= (cur <= prev);
    rate_ok &= (cur / prev <= std::exp(-dt) + 1e-6);
    prev = cur;
  }
  out.require(monotone, "density-ratio norm not monotone");
  out.require(rate_ok, "per-step decay slower than e^{-dt}");
  out.note("orth " + fmt(worst_orth) + ", semigroup " + fmt(worst_semi));
  return out;
}

// --------------------------------------------------------------------------
// 8. Affine antisymmetry score.

Outcome criterion8() {
  Outcome out;
  auto make_curve = [](const std::function<double(double)>& f, int n) {
    SliceCurve c;
    c.grid.resize(n);
    c.values.resize(n);
    for (int i = 0; i < n; ++i) {
      c.grid[i] = -1.0 + 2.0 * i / (n - 1);
      c.values[i] = f(c.grid[i]);
    }
    return c;
  };
  const double as_lin =
      antisymmetry_score(make_curve([](double c) { return c; }, 2001));
  const double as_even =
      antisymmetry_score(make_curve([](double c) { return c * c; }, 2001));
  const double as_mixed =
      antisymmetry_score(make_curve([](double c) { return c + c * c; }, 2001));
  out.require(std::abs(as_lin - 1.0) <= 1e-12, "AS(c) = " + fmt(as_lin));
  out.require(std::abs(as_even) <= 1e-12, "AS(c^2) = " + fmt(as_even));
  out.require(std::abs(as_mixed - 15.0 / 19.0) <= 1e-3,
              "AS(c+c^2) = " + fmt(as_mixed));

  // symmetric-mixture slices at every step
  const int d = 6;
  const Schedule schedule = linear_beta_schedule(10, 0.01, 0.2);
  MixtureParams p;
  p.d = d;
  p.weights = {0.5, 0.5};
  p.sigma2 = {0.25, 0.25};
  p.means.assign(2 * (std::size_t)d, 0.7);
  for (int j = 0; j < d; ++j) p.means[d + j] = -0.7;
  const MixtureScoreField field(p, schedule);
  double worst = 1.0;
  Rng rng(RngStream{808, 0});
  std::vector<double> anchor(d);
  for (int t = 1; t <= 10; ++t) {
    for (int coord : {0, 3, 5}) {
      for (int a = 0; a < 2; ++a) {
        for (double& v : anchor) v = rng.normal();
        const double as =
            antisymmetry_score(slice_curve(field, t, anchor, coord, 201));
        worst = std::min(worst, as);
      }
    }
  }
  out.require(worst >= 1.0 - 1e-8, "min slice AS " + fmt(worst));
  out.note("AS(c+c^2) = " + fmt(as_mixed) + ", min slice AS " + fmt(worst));
  return out;
}

// --------------------------------------------------------------------------
// 9. FKG propositions.

Outcome criterion9() {
  Outcome out;
  int checked = 0, redrawn = 0;
  std::uint64_t attempt = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  while (checked < 100 && attempt < 5000) {
    const int depth = 1 + static_cast<int>(attempt % 5);
    const MonotoneChain chain =
        build_random_chain(RngStream{909, attempt}, depth);
    ++attempt;
    try {
      const CorrEstimate est =
          antithetic_corr([&](double z) { return chain(z); }, 100000,
                          RngStream{910, attempt});
      worst_margin = std::max(worst_margin, est.rho - 3.0 * est.std_error);
      ++checked;
    } catch (const std::domain_error&) {
      ++redrawn;
    }
  }
  out.require(checked == 100, "only " + std::to_string(checked) + " chains");
  out.require(worst_margin <= 0.0,
              "a chain exceeded 3 SE by " + fmt(worst_margin));

  // isotropic-gaussian one-step map: Jacobian entries nonnegative
  MixtureParams iso;
  iso.d = 2;
  iso.weights = {1.0};
  iso.sigma2 = {1.0};
  iso.means = {0.0, 0.0};
  const Schedule schedule = linear_beta_schedule(10, 0.02, 0.2);
  double min_entry = std::numeric_limits<double>::infinity();
  bool condition = true;
  for (int t : {1, 5, 10}) {
    const MonotonicityReport rep =
        ddim_monotonicity_check(iso, schedule, t, 512, RngStream{911, (std::uint64_t)t});
    condition &= rep.condition_holds;
    min_entry = std::min(min_entry, rep.min_jacobian_entry);
  }
  out.require(condition, "one-step condition failed");
  out.require(min_entry >= -1e-8, "min Jacobian entry " + fmt(min_entry));
  out.note("100 chains (" + std::to_string(redrawn) +
           " degenerate redrawn), worst margin " + fmt(worst_margin) +
           ", min Jacobian entry " + fmt(min_entry));
  return out;
}

// --------------------------------------------------------------------------
// 10. Symmetry preservation under the forward flow.

Outcome criterion10() {
  Outcome out;
  MixtureParams p;
  p.d = 2;
  p.weights = {0.5, 0.5};
  p.sigma2 = {0.25, 0.25};
  p.means = {0.9, -0.3, -0.9, 0.3};
  const std::vector<double> reflect{-1.0, 0.0, 0.0, -1.0};
  std::vector<double> ts;
  for (int i = 1; i <= 30; ++i) ts.push_back(0.1 * i);
  const SymmetryCheckReport rep =
      symmetry_preservation_check(p, reflect, ts, 128, RngStream{1010, 1});
  out.require(rep.max_density_residual < 1e-10,
              "density residual " + fmt(rep.max_density_residual));
  out.require(rep.max_score_residual < 1e-10,
              "score residual " + fmt(rep.max_score_residual));
  out.note("residuals " + fmt(rep.max_density_residual) + " / " +
           fmt(rep.max_score_residual));
  return out;
}

// --------------------------------------------------------------------------
// 11. End-to-end determinism of the harness.

Outcome criterion11() {
  Outcome out;
  const fs::path tmp = fs::temp_directory_path() / "noiselab_acceptance_det";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  nlohmann::json cfg{
      {"schema_version", 1},
      {"experiment", "correlation"},
      {"seed", 2025},
      {"pairs", 48},
      {"model",
       {{"shape", {3, 4, 4}},
        {"schedule", {{"type", "linear_beta"},
                      {"steps", 15},
                      {"beta_min", 1e-3},
                      {"beta_max", 0.1}}},
        {"mixture",
         {{"components",
           {{{"weight", 0.5}, {"sigma", 0.5}, {"mean", {{"fill", 0.6}}}},
            {{"weight", 0.5},
             {"sigma", 0.6},
             {"mean", {{"fill", -0.5}}}}}}}}}}};
  const fs::path cfg_path = tmp / "config.json";
  std::ofstream(cfg_path) << cfg.dump(2);

  harness::RunOptions a{cfg_path.string(), (tmp / "a").string()};
  harness::RunOptions b{cfg_path.string(), (tmp / "b").string()};
  b.threads = 2;
  harness::run_experiment("correlation", a);
  harness::run_experiment("correlation", b);

  auto tree_bytes = [](const fs::path& root) {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (!e.is_regular_file()) continue;
      std::ifstream f(e.path(), std::ios::binary);
      std::stringstream ss;
      ss << f.rdbuf();
      files.emplace_back(fs::relative(e.path(), root).generic_string(),
                         ss.str());
    }
    std::sort(files.begin(), files.end());
    return files;
  };
  const auto ta = tree_bytes(tmp / "a");
  const auto tb = tree_bytes(tmp / "b");
  out.require(!ta.empty(), "no artifacts written");
  out.require(ta == tb, "output trees differ between identical runs");
  out.note(std::to_string(ta.size()) + " artifacts compared checksum-identical");
  fs::remove_all(tmp);
  return out;
}

}  // namespace

int main() {
  struct Entry {
    const char* label;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> criteria{
      {"exact antithetic cancellation (linear DDIM)", criterion1},
      {"AMC variance law and coverage", criterion2},
      {"K-antithetic correlation and block sums", criterion3},
      {"efficiency arithmetic vs published entry", criterion4},
      {"RQMC convergence rate and t-CI coverage", criterion5},
      {"Fisher-information decay", criterion6},
      {"Hermite spectral identities", criterion7},
      {"affine antisymmetry score", criterion8},
      {"FKG propositions", criterion9},
      {"symmetry preservation", criterion10},
      {"end-to-end determinism", criterion11},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s  criterion %2zu: %s%s%s\n", out.pass ? "PASS" : "FAIL",
                i + 1, criteria[i].label, out.detail.empty() ? "" : " -- ",
                out.detail.c_str());
    failures += !out.pass;
  }
  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
