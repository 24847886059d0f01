// Timing comparison of the serial reference kernels against the OpenMP
// paths, on the workloads the experiments actually run.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "noiselab/image_stats.hpp"
#include "noiselab/mixture.hpp"
#include "noiselab/noise.hpp"
#include "noiselab/parallel.hpp"
#include "noiselab/sampler.hpp"
#include "noiselab/schedule.hpp"
#include "noiselab/sobol.hpp"

using namespace noiselab;

namespace {

double seconds(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

MixtureParams demo_mixture(int d) {
  MixtureParams p;
  p.d = d;
  p.weights = {0.5, 0.3, 0.2};
  p.sigma2 = {0.25, 0.49, 0.16};
  p.means.assign(3 * static_cast<std::size_t>(d), 0.0);
  for (int j = 0; j < d; ++j) {
    p.means[j] = 0.6;
    p.means[static_cast<std::size_t>(d) + j] = -0.4;
    p.means[2 * static_cast<std::size_t>(d) + j] = (j % 2 == 0) ? 0.2 : -0.2;
  }
  return p;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %8.3fs   openmp %8.3fs   speedup %5.2fx\n", name,
              serial, parallel, serial / parallel);
}

}  // namespace

int main() {
  const int d = 192;  // 3x8x8
  const int n = 512;
  const Schedule schedule = linear_beta_schedule(50, 1e-4, 0.02);
  const MixtureScoreField field(demo_mixture(d), schedule);
  const NoiseBatch batch = gaussian_batch(RngStream{2024, 1}, n, d);

  std::vector<double> serial_out, parallel_out;
  const double t_serial = seconds([&] {
    serial_out = ddim_output_batch(field, schedule, batch, ExecPolicy::serial);
  });
  const double t_parallel = seconds([&] {
    parallel_out = ddim_output_batch(field, schedule, batch, ExecPolicy::openmp);
  });
  report("ddim batch (512x192, T=50)", t_serial, t_parallel);
  if (serial_out != parallel_out) {
    std::printf("MISMATCH: serial and openmp outputs differ\n");
    return 1;
  }

  // per-pair correlations over the generated outputs
  std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
  for (int i = 0; i + 1 < n; i += 2) {
    pairs.emplace_back(
        std::vector<double>(serial_out.begin() + static_cast<long>(i) * d,
                            serial_out.begin() + static_cast<long>(i + 1) * d),
        std::vector<double>(serial_out.begin() + static_cast<long>(i + 1) * d,
                            serial_out.begin() + static_cast<long>(i + 2) * d));
  }
  std::vector<double> corr_serial(pairs.size()), corr_parallel(pairs.size());
  const double c_serial = seconds([&] {
    for (int rep = 0; rep < 50; ++rep) {
      parallel_for(pairs.size(), ExecPolicy::serial, [&](std::size_t i) {
        corr_serial[i] = pearson_standard(pairs[i].first, pairs[i].second);
      });
    }
  });
  const double c_parallel = seconds([&] {
    for (int rep = 0; rep < 50; ++rep) {
      parallel_for(pairs.size(), ExecPolicy::openmp, [&](std::size_t i) {
        corr_parallel[i] = pearson_standard(pairs[i].first, pairs[i].second);
      });
    }
  });
  report("pair correlations x50", c_serial, c_parallel);
  if (corr_serial != corr_parallel) {
    std::printf("MISMATCH: serial and openmp correlations differ\n");
    return 1;
  }

  // Owen-scrambled replicates mapped to Gaussian rows
  const SobolSet raw = sobol_points(d, 64);
  const int reps = 64;
  std::vector<double> sums_serial(reps), sums_parallel(reps);
  auto replicate_sum = [&](std::uint64_t seed) {
    const NoiseBatch g =
        to_gaussian(randomize(raw, Randomization::owen_scramble, seed));
    double s = 0.0;
    for (double v : g.rows) s += v;
    return s;
  };
  const double q_serial = seconds([&] {
    parallel_for(reps, ExecPolicy::serial, [&](std::size_t r) {
      sums_serial[r] = replicate_sum(r);
    });
  });
  const double q_parallel = seconds([&] {
    parallel_for(reps, ExecPolicy::openmp, [&](std::size_t r) {
      sums_parallel[r] = replicate_sum(r);
    });
  });
  report("owen scramble replicates x64", q_serial, q_parallel);
  if (sums_serial != sums_parallel) {
    std::printf("MISMATCH: serial and openmp scrambles differ\n");
    return 1;
  }

  std::printf("all kernel pairs agree bit-for-bit\n");
  return 0;
}
