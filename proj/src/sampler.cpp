#include "noiselab/sampler.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

namespace noiselab {

namespace {

void check_finite(std::span<const double> x, int t) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw NumericalError("non-finite state while applying step " +
                           std::to_string(t));
    }
  }
}

}  // namespace

Trajectory ddim_sample(const ScoreField& score, const Schedule& schedule,
                       std::span<const double> z_init, bool record_eps) {
  const int T = schedule.steps();
  const int d = score.dim();
  if (static_cast<int>(z_init.size()) != d) {
    throw std::invalid_argument("ddim_sample: z_init dimension mismatch");
  }
  Trajectory traj;
  traj.T = T;
  traj.d = d;
  traj.has_eps = record_eps;
  traj.states.resize(static_cast<std::size_t>(T + 1) * d);
  if (record_eps) traj.eps.resize(static_cast<std::size_t>(T) * d);

  std::copy(z_init.begin(), z_init.end(),
            traj.states.begin() + static_cast<std::size_t>(T) * d);
  std::vector<double> eps(d);
  for (int t = T; t >= 1; --t) {
    auto cur = traj.state(t);
    score.eval(t, cur, eps);
    if (record_eps) {
      std::copy(eps.begin(), eps.end(),
                traj.eps.begin() + static_cast<std::size_t>(t - 1) * d);
    }
    const double a = schedule.a(t);
    const double b = schedule.b(t);
    double* next = traj.states.data() + static_cast<std::size_t>(t - 1) * d;
    for (int j = 0; j < d; ++j) next[j] = a * cur[j] + b * eps[j];
    check_finite({next, static_cast<std::size_t>(d)}, t);
  }
  return traj;
}

Trajectory ddpm_sample(const ScoreField& score, const Schedule& schedule,
                       std::span<const double> z_init, RngStream step_noise,
                       bool negate_all, double sigma_scale, bool record_eps) {
  const int T = schedule.steps();
  const int d = score.dim();
  if (static_cast<int>(z_init.size()) != d) {
    throw std::invalid_argument("ddpm_sample: z_init dimension mismatch");
  }
  const double sign = negate_all ? -1.0 : 1.0;

  Trajectory traj;
  traj.T = T;
  traj.d = d;
  traj.has_eps = record_eps;
  traj.states.resize(static_cast<std::size_t>(T + 1) * d);
  if (record_eps) traj.eps.resize(static_cast<std::size_t>(T) * d);

  double* top = traj.states.data() + static_cast<std::size_t>(T) * d;
  for (int j = 0; j < d; ++j) top[j] = sign * z_init[j];

  Rng rng(step_noise);
  std::vector<double> eps(d);
  for (int t = T; t >= 1; --t) {
    auto cur = traj.state(t);
    score.eval(t, cur, eps);
    if (record_eps) {
      std::copy(eps.begin(), eps.end(),
                traj.eps.begin() + static_cast<std::size_t>(t - 1) * d);
    }
    const double alpha = schedule.step_alpha(t);
    const double inv_root_alpha = 1.0 / std::sqrt(alpha);
    const double eps_coeff =
        (1.0 - alpha) / std::sqrt(1.0 - schedule.alpha_bar[t]);
    const double sigma = sigma_scale * schedule.step_sigma(t);
    double* next = traj.states.data() + static_cast<std::size_t>(t - 1) * d;
    for (int j = 0; j < d; ++j) {
      next[j] = inv_root_alpha * (cur[j] - eps_coeff * eps[j]);
    }
    if (t > 1) {
      // z_t is drawn even when sigma is zero so paired runs with different
      // sigma_scale values still consume identical stream positions.
      for (int j = 0; j < d; ++j) next[j] += sigma * sign * rng.normal();
    }
    check_finite({next, static_cast<std::size_t>(d)}, t);
  }
  return traj;
}

std::vector<Trajectory> ddim_sample_batch(const ScoreField& score,
                                          const Schedule& schedule,
                                          const NoiseBatch& batch,
                                          bool record_eps, ExecPolicy policy) {
  std::vector<Trajectory> out(static_cast<std::size_t>(batch.n));
  std::vector<std::string> errors(static_cast<std::size_t>(batch.n));
  parallel_for(static_cast<std::size_t>(batch.n), policy, [&](std::size_t i) {
    try {
      out[i] = ddim_sample(score, schedule,
                           batch.row(static_cast<std::int64_t>(i)), record_eps);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& msg : errors) {
    if (!msg.empty()) throw NumericalError(msg);
  }
  return out;
}

void save_trajectory(const Trajectory& traj, const std::string& prefix) {
  static_assert(std::endian::native == std::endian::little,
                "serializer assumes a little-endian host");
  std::ofstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + prefix + ".bin");
  bin.write(reinterpret_cast<const char*>(traj.states.data()),
            static_cast<std::streamsize>(traj.states.size() * sizeof(double)));
  if (traj.has_eps) {
    bin.write(reinterpret_cast<const char*>(traj.eps.data()),
              static_cast<std::streamsize>(traj.eps.size() * sizeof(double)));
  }
  if (!bin) throw std::runtime_error("short write to " + prefix + ".bin");

  nlohmann::json meta{
      {"T", traj.T}, {"d", traj.d}, {"has_eps", traj.has_eps}};
  std::ofstream side(prefix + ".json");
  if (!side) throw std::runtime_error("cannot open " + prefix + ".json");
  side << meta.dump(2) << "\n";
}

Trajectory load_trajectory(const std::string& prefix) {
  std::ifstream side(prefix + ".json");
  if (!side) throw std::runtime_error("cannot open " + prefix + ".json");
  const nlohmann::json meta = nlohmann::json::parse(side);
  Trajectory traj;
  traj.T = meta.at("T").get<int>();
  traj.d = meta.at("d").get<int>();
  traj.has_eps = meta.at("has_eps").get<bool>();
  traj.states.resize(static_cast<std::size_t>(traj.T + 1) * traj.d);
  if (traj.has_eps) {
    traj.eps.resize(static_cast<std::size_t>(traj.T) * traj.d);
  }
  std::ifstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + prefix + ".bin");
  bin.read(reinterpret_cast<char*>(traj.states.data()),
           static_cast<std::streamsize>(traj.states.size() * sizeof(double)));
  if (traj.has_eps) {
    bin.read(reinterpret_cast<char*>(traj.eps.data()),
             static_cast<std::streamsize>(traj.eps.size() * sizeof(double)));
  }
  if (!bin) throw std::runtime_error("trajectory payload mismatch: " + prefix);
  return traj;
}

std::vector<double> ddim_output_batch(const ScoreField& score,
                                      const Schedule& schedule,
                                      const NoiseBatch& batch,
                                      ExecPolicy policy) {
  const int d = score.dim();
  std::vector<double> out(static_cast<std::size_t>(batch.n) * d);
  std::vector<std::string> errors(static_cast<std::size_t>(batch.n));
  parallel_for(static_cast<std::size_t>(batch.n), policy, [&](std::size_t i) {
    try {
      Trajectory traj = ddim_sample(score, schedule,
                                    batch.row(static_cast<std::int64_t>(i)),
                                    /*record_eps=*/false);
      auto y0 = traj.output();
      std::copy(y0.begin(), y0.end(), out.begin() + i * d);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& msg : errors) {
    if (!msg.empty()) throw NumericalError(msg);
  }
  return out;
}

}  // namespace noiselab
