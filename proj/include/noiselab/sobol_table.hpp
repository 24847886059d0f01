#pragma once

#include <cstdint>

// Bundled direction-number table (Joe-Kuo primitive polynomials and initial
// values); definitions live in the generated sobol_directions.cpp.
namespace noiselab::detail {
extern const int kSobolTableDims;
extern const std::uint32_t kSobolPoly[];
extern const std::uint32_t kSobolMOffset[];
extern const std::uint32_t kSobolM[];
}  // namespace noiselab::detail
