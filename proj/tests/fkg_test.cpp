#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "noiselab/fkg.hpp"
#include "noiselab/rng.hpp"
#include "test_support.hpp"

using namespace noiselab;

TEST_CASE("monotone chains evaluate and stay monotone") {
  MonotoneChain relu;
  relu.weights = {1.0};
  relu.biases = {0.0};
  CHECK(relu(-2.0) == 0.0);
  CHECK(relu(1.5) == 1.5);

  for (int trial = 0; trial < 50; ++trial) {
    const MonotoneChain chain =
        build_random_chain(RngStream{42, static_cast<std::uint64_t>(trial)},
                           1 + trial % 5);
    // outputs over sorted inputs are monotone after sign normalization
    const double xs[5] = {-2.0, -1.0, 0.0, 1.0, 2.0};
    double prev = chain(xs[0]);
    bool nondec = true, noninc = true;
    for (int i = 1; i < 5; ++i) {
      const double v = chain(xs[i]);
      nondec &= (v >= prev - 1e-15);
      noninc &= (v <= prev + 1e-15);
      prev = v;
    }
    REQUIRE((nondec || noninc));
  }

  // deterministic rebuild from the same stream
  const MonotoneChain a = build_random_chain(RngStream{7, 7}, 4);
  const MonotoneChain b = build_random_chain(RngStream{7, 7}, 4);
  CHECK(a.weights == b.weights);
  CHECK(a.biases == b.biases);

  CHECK_THROWS_AS(build_random_chain(RngStream{1, 1}, 0),
                  std::invalid_argument);
}

TEST_CASE("antithetic_corr on closed-form maps") {
  const CorrEstimate ident =
      antithetic_corr([](double z) { return z; }, 2000, RngStream{3, 1});
  CHECK(ident.rho == doctest::Approx(-1.0).epsilon(1e-12));

  const CorrEstimate even =
      antithetic_corr([](double z) { return z * z; }, 2000, RngStream{3, 2});
  CHECK(even.rho == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(antithetic_corr([](double) { return 2.0; }, 2000,
                                  RngStream{3, 3}),
                  std::domain_error);
  CHECK_THROWS_AS(antithetic_corr([](double z) { return z; }, 10,
                                  RngStream{3, 4}),
                  std::invalid_argument);
}

TEST_CASE("jackknife SE shrinks like 1/sqrt(n) and brackets the truth") {
  // mixed-parity map so the pair correlation is strictly inside (-1, 1)
  auto f = [](double z) { return std::tanh(1.3 * z) + 0.4 * z * z; };
  const CorrEstimate small_n = antithetic_corr(f, 2000, RngStream{8, 1});
  const CorrEstimate large_n = antithetic_corr(f, 50000, RngStream{8, 2});
  CHECK(large_n.std_error < small_n.std_error);
  CHECK(large_n.std_error > 0.0);
  CHECK(std::abs(large_n.rho - small_n.rho) <
        4.0 * (small_n.std_error + large_n.std_error));
}

TEST_CASE("100 random chains never violate rho <= 3 SE") {
  int checked = 0;
  std::uint64_t attempt = 0;
  while (checked < 100) {
    const int depth = 1 + static_cast<int>(attempt % 5);
    const MonotoneChain chain =
        build_random_chain(RngStream{99, attempt}, depth);
    ++attempt;
    REQUIRE(attempt < 2000);
    try {
      const CorrEstimate est = antithetic_corr(
          [&](double z) { return chain(z); }, 20000, RngStream{100, attempt});
      REQUIRE(est.rho <= 3.0 * est.std_error);
      ++checked;
    } catch (const std::domain_error&) {
      // constant chain: undefined correlation, draw another
    }
  }
}

TEST_CASE("partial_monotone_corr") {
  // identity with the coordinate sum: exactly -1
  PartialMonotoneMap ident;
  ident.in_dim = ident.out_dim = 3;
  ident.input_signs = {1, 1, 1};
  ident.eval = [](std::span<const double> in, std::span<double> out) {
    std::copy(in.begin(), in.end(), out.begin());
  };
  const std::vector<double> sum_w{1.0, 1.0, 1.0};
  CHECK(partial_monotone_corr(ident, sum_w, 2000, RngStream{4, 1}).rho ==
        doctest::Approx(-1.0).epsilon(1e-12));

  // sign flip absorbed by the statistic: F(x,y) = (x,-y), S = x - y
  PartialMonotoneMap flip;
  flip.in_dim = flip.out_dim = 2;
  flip.input_signs = {1, -1};
  flip.eval = [](std::span<const double> in, std::span<double> out) {
    out[0] = in[0];
    out[1] = -in[1];
  };
  const std::vector<double> diff_w{1.0, -1.0};
  CHECK(partial_monotone_corr(flip, diff_w, 2000, RngStream{4, 2}).rho ==
        doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("random coordinatewise-monotone additive maps stay nonpositive") {
  Rng rng(RngStream{606, 0});
  for (int build = 0; build < 100; ++build) {
    const int in_dim = 2 + build % 3;
    const int out_dim = 2;
    auto signs = std::make_shared<std::vector<int>>();
    auto gains = std::make_shared<std::vector<double>>();
    auto bends = std::make_shared<std::vector<double>>();
    for (int j = 0; j < in_dim; ++j) {
      signs->push_back(rng.uniform01() < 0.5 ? 1 : -1);
      for (int i = 0; i < out_dim; ++i) {
        gains->push_back(rng.uniform01());
        bends->push_back(0.5 + rng.uniform01());
      }
    }
    PartialMonotoneMap map;
    map.in_dim = in_dim;
    map.out_dim = out_dim;
    map.input_signs = *signs;
    map.eval = [=](std::span<const double> in, std::span<double> out) {
      for (int i = 0; i < out_dim; ++i) {
        double s = 0.0;
        for (int j = 0; j < in_dim; ++j) {
          const double u = (*signs)[j] * in[j];
          s += (*gains)[static_cast<std::size_t>(j) * out_dim + i] *
               std::tanh((*bends)[static_cast<std::size_t>(j) * out_dim + i] *
                         u);
        }
        out[i] = s;
      }
    };
    const std::vector<double> w{0.7, 0.3};  // nonnegative linear statistic
    const CorrEstimate est = partial_monotone_corr(
        map, w, 4000, RngStream{607, static_cast<std::uint64_t>(build)});
    REQUIRE(est.rho <= 3.0 * est.std_error);
  }
}

TEST_CASE("sign normalization is an exact reindexing under common draws") {
  // Corr(G(Z), G(-Z)) equals the correlation computed after applying the
  // sign vector to the inputs, because {s .* z_i} is the same sample set
  // when evaluated with common random numbers.
  const std::vector<int> signs{1, -1, 1};
  auto g = [&](std::span<const double> z) {
    return std::tanh(z[0]) - 0.8 * std::tanh(1.7 * z[1]) + 0.4 * z[2];
  };
  Rng rng(RngStream{11, 11});
  const int n = 5000;
  std::vector<double> direct_p(n), direct_m(n), flipped_p(n), flipped_m(n);
  std::vector<double> z(3), sz(3);
  for (int i = 0; i < n; ++i) {
    for (double& v : z) v = rng.normal();
    for (int j = 0; j < 3; ++j) sz[j] = signs[j] * z[j];
    direct_p[i] = g(sz);
    for (auto& v : sz) v = -v;
    direct_m[i] = g(sz);
    // same draws, signs burned into the evaluation
    auto gt = [&](std::span<const double> in) {
      std::vector<double> w(3);
      for (int j = 0; j < 3; ++j) w[j] = signs[j] * in[j];
      return g(w);
    };
    flipped_p[i] = gt(z);
    for (auto& v : z) v = -v;
    flipped_m[i] = gt(z);
  }
  const double r1 = testsupport::naive_pearson(direct_p, direct_m);
  const double r2 = testsupport::naive_pearson(flipped_p, flipped_m);
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));
}

TEST_CASE("linear map correlation converges at the root-n rate") {
  PartialMonotoneMap lin;
  lin.in_dim = lin.out_dim = 2;
  lin.input_signs = {1, 1};
  lin.eval = [](std::span<const double> in, std::span<double> out) {
    out[0] = 2.0 * in[0] + in[1];
    out[1] = in[0] + 0.5 * in[1];
  };
  const std::vector<double> w{1.0, 2.0};
  for (int n : {1000, 16000}) {
    const CorrEstimate est =
        partial_monotone_corr(lin, w, n, RngStream{21, 4});
    REQUIRE(std::abs(est.rho + 1.0) < 5.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("ddim monotonicity: isotropic gaussian") {
  MixtureParams p;
  p.d = 2;
  p.weights = {1.0};
  p.sigma2 = {1.0};
  p.means = {0.0, 0.0};
  const Schedule s = linear_beta_schedule(10, 0.02, 0.2);
  const MonotonicityReport r =
      ddim_monotonicity_check(p, s, 5, 512, RngStream{50, 1});
  CHECK(r.kappa == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(r.min_offdiagonal) < 1e-9);
  CHECK(r.condition_holds);  // a_t >= c_t here
  CHECK(r.a >= r.c);
  CHECK(r.min_jacobian_entry >= -1e-8);
}

TEST_CASE("exact mixture scores satisfy the condition at every step") {
  // curvature of a noised isotropic mixture is at most 1/(1-alpha_bar_t),
  // which keeps c*kappa strictly below a for any decreasing schedule
  MixtureParams p;
  p.d = 1;
  p.weights = {0.5, 0.5};
  p.sigma2 = {0.0025, 0.0025};
  p.means = {1.0, -1.0};
  const Schedule s = linear_beta_schedule(12, 0.05, 0.4);
  for (int t = 1; t <= 12; ++t) {
    const MonotonicityReport r =
        ddim_monotonicity_check(p, s, t, 256, RngStream{50, 7});
    REQUIRE(r.condition_holds);
    REQUIRE(r.kappa <= 1.0 / (1.0 - s.alpha_bar[t]) + 1e-9);
  }
}

TEST_CASE("ddim monotonicity: violated condition is flagged") {
  // an amplified (imperfect) score drives a < c * kappa on a narrow mixture
  MixtureParams p;
  p.d = 1;
  p.weights = {0.5, 0.5};
  p.sigma2 = {0.0025, 0.0025};
  p.means = {1.0, -1.0};
  Schedule s(std::vector<double>{1.0, 0.95, 0.6});
  const MonotonicityReport r =
      ddim_monotonicity_check(p, s, 2, 512, RngStream{50, 2}, 4.0);
  CHECK_FALSE(r.condition_holds);
  // the step map genuinely loses monotonicity somewhere
  CHECK(r.min_jacobian_entry < 0.0);
}

TEST_CASE("chained steps: composed map nondecreasing when every step holds") {
  MixtureParams p;
  p.d = 2;
  p.weights = {1.0};
  p.sigma2 = {1.0};
  p.means = {0.0, 0.0};
  const Schedule s = linear_beta_schedule(8, 0.02, 0.15);
  const ChainMonotonicityReport r =
      ddim_chain_monotonicity_check(p, s, 128, RngStream{51, 3});
  CHECK(r.condition_holds_everywhere);
  CHECK(r.min_composed_jacobian_entry >= -1e-8);
}
