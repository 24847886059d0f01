#pragma once

#include <cstdint>

namespace noiselab {

// splitmix64 finalizer; used for stream derivation and scramble keys.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Label of an independent random stream. Identical (seed, stream_id) pairs
// reproduce identical draws bit for bit; distinct stream_ids are
// statistically independent, so workers may run concurrently as long as
// each owns its own stream.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  // Deterministically derived substream, independent of the parent.
  RngStream child(std::uint64_t salt) const {
    return RngStream{seed, mix64(stream_id ^ mix64(salt))};
  }
};

// Philox4x32-10 counter-based generator. The stream id fills the high half
// of the 128-bit counter and the draw index the low half, so streams never
// overlap and any draw can be regenerated from (seed, stream_id, index).
class Rng {
 public:
  explicit Rng(RngStream stream) : stream_(stream) {}

  std::uint64_t next_u64();
  double uniform01();  // strictly inside (0,1)
  double normal();     // standard normal via the inverse CDF

  RngStream stream() const { return stream_; }

 private:
  RngStream stream_;
  std::uint64_t counter_ = 0;
  std::uint64_t cached_ = 0;
  bool has_cached_ = false;
};

}  // namespace noiselab
