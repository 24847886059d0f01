#include <doctest.h>

#include <cmath>
#include <vector>

#include "noiselab/noise.hpp"
#include "noiselab/sampler.hpp"
#include "noiselab/symmetry.hpp"
#include "test_support.hpp"

using namespace noiselab;

namespace {

// fixed synthetic curve on the slice grid
SliceCurve curve_from(const std::function<double(double)>& f, int grid_size) {
  SliceCurve c;
  c.grid.resize(grid_size);
  c.values.resize(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    c.grid[i] = -1.0 + 2.0 * i / (grid_size - 1);
    c.values[i] = f(c.grid[i]);
  }
  return c;
}

MixtureParams symmetric_mixture(int d, double m, double sigma) {
  MixtureParams p;
  p.d = d;
  p.weights = {0.5, 0.5};
  p.sigma2 = {sigma * sigma, sigma * sigma};
  p.means.assign(2 * static_cast<std::size_t>(d), m);
  for (int j = 0; j < d; ++j) p.means[d + j] = -m;
  return p;
}

}  // namespace

TEST_CASE("slice_curve samples eps along the segment") {
  const Schedule s = linear_beta_schedule(10, 0.02, 0.3);
  MixtureParams lin;
  lin.d = 2;
  lin.weights = {1.0};
  lin.sigma2 = {1.0};
  lin.means = {0.0, 0.0};
  const MixtureScoreField field(lin, s);

  const std::vector<double> anchor{1.4, -0.6};
  const SliceCurve curve = slice_curve(field, 4, anchor, 0, 5);
  CHECK(curve.grid.size() == 5);
  CHECK(curve.grid[0] == -1.0);
  CHECK(curve.grid[2] == 0.0);
  CHECK(curve.grid[4] == 1.0);
  // linear field: the slice is linear in c
  const double scale = std::sqrt(1.0 - s.alpha_bar[4]);
  for (int i = 0; i < 5; ++i) {
    REQUIRE(curve.values[i] ==
            doctest::Approx(scale * curve.grid[i] * anchor[0]).epsilon(1e-12));
  }

  // grid size 3 hits exactly {-1, 0, 1}
  const SliceCurve three = slice_curve(field, 4, anchor, 1, 3);
  CHECK(three.grid == std::vector<double>{-1.0, 0.0, 1.0});

  CHECK_THROWS_AS(slice_curve(field, 4, anchor, 2, 5), std::invalid_argument);
  CHECK_THROWS_AS(slice_curve(field, 4, anchor, 0, 4), std::invalid_argument);
}

TEST_CASE("symmetric-mixture slices are odd pointwise") {
  const Schedule s = linear_beta_schedule(12, 0.02, 0.25);
  const MixtureScoreField field(symmetric_mixture(3, 0.7, 0.4), s);
  Rng rng(RngStream{17, 3});
  std::vector<double> anchor(3);
  for (double& v : anchor) v = rng.normal();
  for (int t : {1, 6, 12}) {
    const SliceCurve c = slice_curve(field, t, anchor, 1, 41);
    for (int i = 0; i < 41; ++i) {
      REQUIRE(std::abs(c.values[i] + c.values[40 - i]) < 1e-10);
    }
  }
}

TEST_CASE("antisymmetry_score on closed-form curves") {
  CHECK(antisymmetry_score(curve_from([](double c) { return c; }, 201)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(antisymmetry_score(curve_from([](double c) { return c * c; }, 201)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // 1 - (8/45)/(38/45) = 15/19, trapezoid at grid 2001 within 1e-3
  CHECK(antisymmetry_score(
            curve_from([](double c) { return c + c * c; }, 2001)) ==
        doctest::Approx(15.0 / 19.0).epsilon(1e-3));
  CHECK_THROWS_AS(
      antisymmetry_score(curve_from([](double) { return 3.7; }, 201)),
      std::invalid_argument);
}

TEST_CASE("antisymmetry_score invariances and decomposition") {
  Rng rng(RngStream{23, 1});
  for (int trial = 0; trial < 25; ++trial) {
    // random smooth curve via a short cosine/sine series
    std::vector<double> cs(4), sn(4);
    for (double& v : cs) v = rng.normal();
    for (double& v : sn) v = rng.normal();
    auto f = [&](double c) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) {
        s += cs[k] * std::cos(k * c) + sn[k] * std::sin((k + 1) * c);
      }
      return s;
    };
    const SliceCurve base = curve_from(f, 401);
    const double as = antisymmetry_score(base);

    // affine reparameterization f -> a f + b
    const double a = rng.normal() + 2.5;
    const double b = rng.normal();
    SliceCurve scaled = base;
    for (double& v : scaled.values) v = a * v + b;
    REQUIRE(antisymmetry_score(scaled) == doctest::Approx(as).epsilon(1e-10));

    // variance-elimination identity: var of the antithetic average equals
    // (1 - AS) times the curve variance, on the same quadrature grid
    const std::size_t n = base.grid.size();
    SliceCurve avg = base;
    for (std::size_t i = 0; i < n; ++i) {
      avg.values[i] = 0.5 * (base.values[i] + base.values[n - 1 - i]);
    }
    auto trap_var = [&](const SliceCurve& c) {
      double mean = 0.0, len = 2.0;
      for (std::size_t i = 0; i + 1 < c.grid.size(); ++i) {
        mean += 0.5 * (c.values[i] + c.values[i + 1]) *
                (c.grid[i + 1] - c.grid[i]);
      }
      mean /= len;
      double var = 0.0;
      for (std::size_t i = 0; i + 1 < c.grid.size(); ++i) {
        const double d0 = c.values[i] - mean;
        const double d1 = c.values[i + 1] - mean;
        var += 0.5 * (d0 * d0 + d1 * d1) * (c.grid[i + 1] - c.grid[i]);
      }
      return var;
    };
    REQUIRE(trap_var(avg) ==
            doctest::Approx((1.0 - as) * trap_var(base)).epsilon(1e-9));
  }

  // strictly mixed parity lands strictly inside (0,1)
  const double mixed = antisymmetry_score(
      curve_from([](double c) { return std::sin(c) + 0.5 * c * c; }, 801));
  CHECK(mixed > 0.0);
  CHECK(mixed < 1.0);
}

TEST_CASE("temporal_correlation on PN pairs") {
  const int d = 24;
  const std::int64_t pairs = 200;
  const Schedule s = linear_beta_schedule(20, 1e-3, 0.1);

  SUBCASE("linear field: centralized state correlation -1 at every step") {
    MixtureParams lin;
    lin.d = d;
    lin.weights = {1.0};
    lin.sigma2 = {1.0};
    lin.means.assign(d, 0.0);
    const MixtureScoreField field(lin, s);
    NoiseBatch pn =
        antithetic_expand(gaussian_batch(RngStream{2024, 10}, pairs, d));
    auto trajs = ddim_sample_batch(field, s, pn, true, ExecPolicy::serial);
    std::vector<std::pair<Trajectory, Trajectory>> tp;
    for (std::int64_t i = 0; i < pairs; ++i) {
      tp.emplace_back(std::move(trajs[2 * i]), std::move(trajs[2 * i + 1]));
    }
    const TemporalCorrelation tc = temporal_correlation(tp);
    // step T compares the raw antithetic noise: exactly -1
    CHECK(tc.state_mean[20] == doctest::Approx(-1.0).epsilon(1e-12));
    for (int t = 0; t <= 20; ++t) {
      REQUIRE(tc.state_cent_mean[t] == doctest::Approx(-1.0).epsilon(1e-9));
    }
  }

  SUBCASE("symmetric mixture: eps correlation near -1 at the noisy quarter") {
    const MixtureScoreField field(symmetric_mixture(d, 0.6, 0.5), s);
    NoiseBatch pn =
        antithetic_expand(gaussian_batch(RngStream{2024, 11}, pairs, d));
    auto trajs = ddim_sample_batch(field, s, pn, true, ExecPolicy::serial);
    std::vector<std::pair<Trajectory, Trajectory>> tp;
    for (std::int64_t i = 0; i < pairs; ++i) {
      tp.emplace_back(std::move(trajs[2 * i]), std::move(trajs[2 * i + 1]));
    }
    const TemporalCorrelation tc = temporal_correlation(tp);
    for (int t = 16; t <= 20; ++t) {
      REQUIRE(tc.eps_mean[t] <= -0.9);
    }
    std::vector<std::pair<Trajectory, Trajectory>> one(tp.begin(),
                                                       tp.begin() + 1);
    CHECK_THROWS_AS(temporal_correlation(one), std::invalid_argument);
  }
}

TEST_CASE("symmetry_center") {
  const int d = 5;
  const Schedule s = linear_beta_schedule(10, 0.5, 0.7);

  // exactly odd field: center 0
  const MixtureScoreField odd_field(symmetric_mixture(d, 0.8, 0.5), s);
  CHECK(std::abs(symmetry_center(odd_field, 3, 0, 50, RngStream{5, 5})) <
        1e-12);

  // constant-shifted field: center recovers the shift
  struct Shifted : ScoreField {
    const ScoreField& inner;
    double kappa;
    Shifted(const ScoreField& f, double k) : inner(f), kappa(k) {}
    int dim() const override { return inner.dim(); }
    void eval(int t, std::span<const double> x,
              std::span<double> eps) const override {
      inner.eval(t, x, eps);
      for (auto& v : eps) v += kappa;
    }
  };
  const Shifted shifted(odd_field, 0.37);
  CHECK(symmetry_center(shifted, 3, 2, 50, RngStream{5, 6}) ==
        doctest::Approx(0.37).epsilon(1e-12));

  // shifted single gaussian: |center| decays along this schedule
  // (alpha_bar <= 1/2 everywhere, so sqrt(ab(1-ab)) decreases in t)
  MixtureParams shifted_gauss;
  shifted_gauss.d = d;
  shifted_gauss.weights = {1.0};
  shifted_gauss.sigma2 = {1.0};
  shifted_gauss.means.assign(d, 1.2);
  const MixtureScoreField sg(shifted_gauss, s);
  std::vector<double> centers;
  for (int t = 1; t <= 10; ++t) {
    centers.push_back(
        std::abs(symmetry_center(sg, t, 1, 40, RngStream{5, 7})));
  }
  for (std::size_t i = 1; i < centers.size(); ++i) {
    REQUIRE(centers[i] < centers[i - 1]);
  }
}
