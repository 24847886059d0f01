#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "noiselab/noise.hpp"

namespace noiselab {

enum class Randomization { none, digital_shift, owen_scramble };

const char* randomization_name(Randomization r);

// A Sobol' point set in (0,1)^d. Unrandomized sets contain the origin and
// are only an intermediate product; randomized sets are marginally uniform
// and keep the base-2 digital-net property.
struct SobolSet {
  int d = 0;
  std::int64_t n = 0;
  Randomization method = Randomization::none;
  std::uint64_t seed = 0;
  std::vector<double> points;  // n*d, row-major

  double at(std::int64_t i, int j) const { return points[i * d + j]; }
};

// Largest supported dimension (size of the bundled direction-number table).
int sobol_max_dimension();

// Canonical Sobol' points at indices 0..n-1 (gray-code order, index 0 is
// the origin). n must be a power of two; d must fit the bundled table.
SobolSet sobol_points(int d, std::int64_t n);

// Applies a random digital shift or a nested uniform (Owen) scramble.
// Distinct seeds give independent replicates; outputs are clamped inside
// (0,1) so the Gaussian map below stays finite.
SobolSet randomize(const SobolSet& set, Randomization method,
                   std::uint64_t seed);

// The 52-bit digital-shift vector used for a given (seed, dim); exposed so
// replications can be reproduced outside the library.
std::uint64_t digital_shift_bits(std::uint64_t seed, int dim);

// Coordinate-wise inverse normal CDF; rejects unrandomized sets (they
// contain the origin, which maps to -infinity).
NoiseBatch to_gaussian(const SobolSet& set);

}  // namespace noiselab
