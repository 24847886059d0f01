#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "noiselab/rng.hpp"

namespace noiselab {

enum class NoiseDesign { iid, antithetic_pair, k_antithetic, masked, rqmc };

const char* noise_design_name(NoiseDesign d);
NoiseDesign noise_design_from_name(const std::string& name);

// A batch of noise rows. Every row is marginally a d-dimensional standard
// normal draw; the design tag records the joint structure:
//   iid             independent rows
//   antithetic_pair row 2i+1 == -(row 2i) exactly
//   k_antithetic    blocks of k rows summing to the zero vector
//   masked          rows obtained by partial negation
//   rqmc            rows mapped from a randomized low-discrepancy set
struct NoiseBatch {
  std::int64_t n = 0;
  int d = 0;
  NoiseDesign design = NoiseDesign::iid;
  int k = 0;  // block size for k_antithetic, else 0
  RngStream source{};
  std::string randomization;            // rqmc only: "digital_shift"/"owen_scramble"
  std::uint64_t randomization_seed = 0;  // rqmc only
  std::vector<double> rows;             // n*d, row-major

  std::span<double> row(std::int64_t i) {
    return {rows.data() + i * d, static_cast<std::size_t>(d)};
  }
  std::span<const double> row(std::int64_t i) const {
    return {rows.data() + i * d, static_cast<std::size_t>(d)};
  }
  double& at(std::int64_t i, int j) { return rows[i * d + j]; }
  double at(std::int64_t i, int j) const { return rows[i * d + j]; }
};

// n independent standard-normal rows, deterministic given the stream.
NoiseBatch gaussian_batch(RngStream stream, std::int64_t n, int d);

// Interleaves each input row with its exact negation: rows 2i and 2i+1 of
// the output satisfy row(2i+1) == -row(2i). Rejects non-iid input.
NoiseBatch antithetic_expand(const NoiseBatch& batch);

// Blocks of K rows built as sqrt(K/(K-1)) * (w_i - wbar) from independent
// normals, then recentered so every block sums to zero exactly. Each row is
// marginally standard normal and distinct rows of a block have correlation
// -1/(K-1) in every coordinate.
NoiseBatch k_antithetic_batch(RngStream stream, int K, int d,
                              std::int64_t blocks);

// Negates the coordinates selected by the mask.
std::vector<double> partial_negate(std::span<const double> z,
                                   const std::vector<bool>& mask);

// Raw little-endian float64 rows at <prefix>.bin plus a JSON sidecar at
// <prefix>.json carrying {n, d, design, seed, stream_id, ...}.
void save_noise_batch(const NoiseBatch& batch, const std::string& prefix);
NoiseBatch load_noise_batch(const std::string& prefix);

}  // namespace noiselab
