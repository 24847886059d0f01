#include "noiselab/sobol.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "noiselab/normal.hpp"
#include "noiselab/sobol_table.hpp"

namespace noiselab {

namespace {

constexpr int kBits = 52;
constexpr std::uint64_t kBitsMask = (std::uint64_t(1) << kBits) - 1;
constexpr double kScale = 0x1p-52;
constexpr double kClampLo = 0x1p-53;
constexpr double kClampHi = 1.0 - 0x1p-53;

// Direction integers v[1..kBits] for one dimension (0-based index).
void direction_integers(int dim, std::uint64_t v[kBits + 1]) {
  if (dim == 0) {
    for (int k = 1; k <= kBits; ++k) v[k] = std::uint64_t(1) << (kBits - k);
    return;
  }
  const std::uint32_t poly = detail::kSobolPoly[dim - 1];
  const int s = std::bit_width(poly) - 1;
  const std::uint32_t* m = detail::kSobolM + detail::kSobolMOffset[dim - 1];
  for (int k = 1; k <= s; ++k) {
    v[k] = static_cast<std::uint64_t>(m[k - 1]) << (kBits - k);
  }
  for (int k = s + 1; k <= kBits; ++k) {
    std::uint64_t nv = v[k - s] ^ (v[k - s] >> s);
    for (int i = 1; i < s; ++i) {
      if ((poly >> (s - i)) & 1u) nv ^= v[k - i];
    }
    v[k] = nv;
  }
}

std::uint64_t point_bits(double u) {
  return static_cast<std::uint64_t>(u * 0x1p52);  // exact for our dyadics
}

std::uint64_t owen_scramble_bits(std::uint64_t bits, std::uint64_t key) {
  std::uint64_t out = 0;
  for (int b = kBits - 1; b >= 0; --b) {
    // Node of the binary tree = digits above position b, with a sentinel
    // bit so prefixes of different depths never collide.
    const std::uint64_t node =
        (bits >> (b + 1)) | (std::uint64_t(1) << (kBits - 1 - b));
    const std::uint64_t flip = mix64(key ^ mix64(node)) & 1u;
    out |= (((bits >> b) & 1u) ^ flip) << b;
  }
  return out;
}

double clamp_unit(double u) {
  if (u < kClampLo) return kClampLo;
  if (u > kClampHi) return kClampHi;
  return u;
}

}  // namespace

const char* randomization_name(Randomization r) {
  switch (r) {
    case Randomization::none:
      return "none";
    case Randomization::digital_shift:
      return "digital_shift";
    case Randomization::owen_scramble:
      return "owen_scramble";
  }
  return "none";
}

int sobol_max_dimension() { return detail::kSobolTableDims; }

SobolSet sobol_points(int d, std::int64_t n) {
  if (d < 1 || d > detail::kSobolTableDims) {
    throw std::invalid_argument(
        "sobol_points: dimension outside the bundled direction-number table "
        "(1.." +
        std::to_string(detail::kSobolTableDims) + ")");
  }
  if (n < 1 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("sobol_points: n must be a power of two");
  }
  SobolSet set;
  set.d = d;
  set.n = n;
  set.points.assign(static_cast<std::size_t>(n) * d, 0.0);

  std::vector<std::uint64_t> v(static_cast<std::size_t>(d) * (kBits + 1));
  for (int j = 0; j < d; ++j) direction_integers(j, v.data() + j * (kBits + 1));

  std::vector<std::uint64_t> x(d, 0);
  for (std::int64_t i = 1; i < n; ++i) {
    const int c = std::countr_zero(static_cast<std::uint64_t>(i));  // gray code
    for (int j = 0; j < d; ++j) {
      x[j] ^= v[static_cast<std::size_t>(j) * (kBits + 1) + c + 1];
      set.points[static_cast<std::size_t>(i) * d + j] =
          static_cast<double>(x[j]) * kScale;
    }
  }
  return set;
}

std::uint64_t digital_shift_bits(std::uint64_t seed, int dim) {
  return mix64(mix64(seed) ^ (0x5851F42D4C957F2Dull + dim)) & kBitsMask;
}

SobolSet randomize(const SobolSet& set, Randomization method,
                   std::uint64_t seed) {
  if (set.method != Randomization::none) {
    throw std::invalid_argument("randomize: set is already randomized");
  }
  if (method == Randomization::none) {
    throw std::invalid_argument("randomize: method must be a randomization");
  }
  SobolSet out;
  out.d = set.d;
  out.n = set.n;
  out.method = method;
  out.seed = seed;
  out.points.resize(set.points.size());

  for (int j = 0; j < set.d; ++j) {
    const std::uint64_t shift = digital_shift_bits(seed, j);
    const std::uint64_t owen_key = mix64(seed ^ mix64(0xA5A5A5A5u + j));
    for (std::int64_t i = 0; i < set.n; ++i) {
      std::uint64_t bits = point_bits(set.at(i, j));
      if (method == Randomization::digital_shift) {
        bits ^= shift;
      } else {
        bits = owen_scramble_bits(bits, owen_key);
      }
      out.points[static_cast<std::size_t>(i) * set.d + j] =
          clamp_unit(static_cast<double>(bits) * kScale);
    }
  }
  return out;
}

NoiseBatch to_gaussian(const SobolSet& set) {
  if (set.method == Randomization::none) {
    throw std::invalid_argument(
        "to_gaussian: set must be randomized (the raw set contains the "
        "origin)");
  }
  NoiseBatch batch;
  batch.n = set.n;
  batch.d = set.d;
  batch.design = NoiseDesign::rqmc;
  batch.source = RngStream{set.seed, 0};
  batch.randomization = randomization_name(set.method);
  batch.randomization_seed = set.seed;
  batch.rows.resize(set.points.size());
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    batch.rows[i] = norm_ppf(set.points[i]);
  }
  return batch;
}

}  // namespace noiselab
