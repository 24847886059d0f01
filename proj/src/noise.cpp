#include "noiselab/noise.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace noiselab {

const char* noise_design_name(NoiseDesign d) {
  switch (d) {
    case NoiseDesign::iid:
      return "iid";
    case NoiseDesign::antithetic_pair:
      return "antithetic_pair";
    case NoiseDesign::k_antithetic:
      return "k_antithetic";
    case NoiseDesign::masked:
      return "masked";
    case NoiseDesign::rqmc:
      return "rqmc";
  }
  return "iid";
}

NoiseDesign noise_design_from_name(const std::string& name) {
  for (NoiseDesign d :
       {NoiseDesign::iid, NoiseDesign::antithetic_pair,
        NoiseDesign::k_antithetic, NoiseDesign::masked, NoiseDesign::rqmc}) {
    if (name == noise_design_name(d)) return d;
  }
  throw std::invalid_argument("unknown noise design: " + name);
}

NoiseBatch gaussian_batch(RngStream stream, std::int64_t n, int d) {
  if (n < 1 || d < 1) {
    throw std::invalid_argument("gaussian_batch: need n >= 1 and d >= 1");
  }
  NoiseBatch batch;
  batch.n = n;
  batch.d = d;
  batch.design = NoiseDesign::iid;
  batch.source = stream;
  batch.rows.resize(static_cast<std::size_t>(n) * d);
  Rng rng(stream);
  for (double& v : batch.rows) v = rng.normal();
  return batch;
}

NoiseBatch antithetic_expand(const NoiseBatch& batch) {
  if (batch.design != NoiseDesign::iid) {
    throw std::invalid_argument(
        "antithetic_expand: input must be an iid batch");
  }
  NoiseBatch out;
  out.n = 2 * batch.n;
  out.d = batch.d;
  out.design = NoiseDesign::antithetic_pair;
  out.source = batch.source;
  out.rows.resize(static_cast<std::size_t>(out.n) * out.d);
  for (std::int64_t i = 0; i < batch.n; ++i) {
    auto src = batch.row(i);
    auto pos = out.row(2 * i);
    auto neg = out.row(2 * i + 1);
    for (int j = 0; j < batch.d; ++j) {
      pos[j] = src[j];
      neg[j] = -src[j];
    }
  }
  return out;
}

NoiseBatch k_antithetic_batch(RngStream stream, int K, int d,
                              std::int64_t blocks) {
  if (K < 2) throw std::invalid_argument("k_antithetic_batch: K >= 2");
  if (d < 1 || blocks < 1) {
    throw std::invalid_argument("k_antithetic_batch: need d >= 1, blocks >= 1");
  }
  NoiseBatch out;
  out.n = static_cast<std::int64_t>(K) * blocks;
  out.d = d;
  out.design = NoiseDesign::k_antithetic;
  out.k = K;
  out.source = stream;
  out.rows.resize(static_cast<std::size_t>(out.n) * d);

  const double scale = std::sqrt(static_cast<double>(K) / (K - 1));
  Rng rng(stream);
  std::vector<double> w(static_cast<std::size_t>(K) * d);
  for (std::int64_t b = 0; b < blocks; ++b) {
    for (double& v : w) v = rng.normal();
    double* block = out.rows.data() + b * K * d;
    for (int j = 0; j < d; ++j) {
      double mean = 0.0;
      for (int i = 0; i < K; ++i) mean += w[static_cast<std::size_t>(i) * d + j];
      mean /= K;
      double resid = 0.0;
      for (int i = 0; i < K; ++i) {
        const double z = scale * (w[static_cast<std::size_t>(i) * d + j] - mean);
        block[static_cast<std::size_t>(i) * d + j] = z;
        resid += z;
      }
      // Remove the scaling residual so the block invariant is exact.
      resid /= K;
      for (int i = 0; i < K; ++i) {
        block[static_cast<std::size_t>(i) * d + j] -= resid;
      }
    }
  }
  return out;
}

std::vector<double> partial_negate(std::span<const double> z,
                                   const std::vector<bool>& mask) {
  if (z.size() != mask.size()) {
    throw std::invalid_argument("partial_negate: mask length must match d");
  }
  std::vector<double> out(z.begin(), z.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (mask[i]) out[i] = -out[i];
  }
  return out;
}

void save_noise_batch(const NoiseBatch& batch, const std::string& prefix) {
  static_assert(std::endian::native == std::endian::little,
                "serializer assumes a little-endian host");
  std::ofstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + prefix + ".bin");
  bin.write(reinterpret_cast<const char*>(batch.rows.data()),
            static_cast<std::streamsize>(batch.rows.size() * sizeof(double)));
  if (!bin) throw std::runtime_error("short write to " + prefix + ".bin");

  nlohmann::json meta{{"n", batch.n},
                      {"d", batch.d},
                      {"design", noise_design_name(batch.design)},
                      {"seed", batch.source.seed},
                      {"stream_id", batch.source.stream_id}};
  if (batch.design == NoiseDesign::k_antithetic) meta["k"] = batch.k;
  if (batch.design == NoiseDesign::rqmc) {
    meta["randomization"] = batch.randomization;
    meta["randomization_seed"] = batch.randomization_seed;
  }
  std::ofstream side(prefix + ".json");
  if (!side) throw std::runtime_error("cannot open " + prefix + ".json");
  side << meta.dump(2) << "\n";
}

NoiseBatch load_noise_batch(const std::string& prefix) {
  std::ifstream side(prefix + ".json");
  if (!side) throw std::runtime_error("cannot open " + prefix + ".json");
  nlohmann::json meta = nlohmann::json::parse(side);

  NoiseBatch batch;
  batch.n = meta.at("n").get<std::int64_t>();
  batch.d = meta.at("d").get<int>();
  batch.design = noise_design_from_name(meta.at("design").get<std::string>());
  batch.source.seed = meta.at("seed").get<std::uint64_t>();
  batch.source.stream_id = meta.at("stream_id").get<std::uint64_t>();
  if (meta.contains("k")) batch.k = meta["k"].get<int>();
  if (meta.contains("randomization")) {
    batch.randomization = meta["randomization"].get<std::string>();
    batch.randomization_seed = meta["randomization_seed"].get<std::uint64_t>();
  }

  std::ifstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + prefix + ".bin");
  batch.rows.resize(static_cast<std::size_t>(batch.n) * batch.d);
  bin.read(reinterpret_cast<char*>(batch.rows.data()),
           static_cast<std::streamsize>(batch.rows.size() * sizeof(double)));
  if (bin.gcount() !=
      static_cast<std::streamsize>(batch.rows.size() * sizeof(double))) {
    throw std::runtime_error("noise payload size mismatch for " + prefix);
  }
  return batch;
}

}  // namespace noiselab
