#include "noiselab/rng.hpp"

#include "noiselab/normal.hpp"

namespace noiselab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

struct Block {
  std::uint32_t v[4];
};

inline Block philox4x32_10(std::uint64_t key64, std::uint64_t ctr_lo,
                           std::uint64_t ctr_hi) {
  std::uint32_t c0 = static_cast<std::uint32_t>(ctr_lo);
  std::uint32_t c1 = static_cast<std::uint32_t>(ctr_lo >> 32);
  std::uint32_t c2 = static_cast<std::uint32_t>(ctr_hi);
  std::uint32_t c3 = static_cast<std::uint32_t>(ctr_hi >> 32);
  std::uint32_t k0 = static_cast<std::uint32_t>(key64);
  std::uint32_t k1 = static_cast<std::uint32_t>(key64 >> 32);

  for (int round = 0; round < 10; ++round) {
    std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
    std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
    std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
    std::uint32_t n1 = static_cast<std::uint32_t>(p1);
    std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
    std::uint32_t n3 = static_cast<std::uint32_t>(p0);
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return Block{{c0, c1, c2, c3}};
}

}  // namespace

std::uint64_t Rng::next_u64() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  Block b = philox4x32_10(stream_.seed, counter_++, stream_.stream_id);
  cached_ = (static_cast<std::uint64_t>(b.v[2]) << 32) | b.v[3];
  has_cached_ = true;
  return (static_cast<std::uint64_t>(b.v[0]) << 32) | b.v[1];
}

double Rng::uniform01() {
  // 53-bit mantissa offset by half an ulp: never exactly 0 or 1.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
}

double Rng::normal() { return norm_ppf(uniform01()); }

}  // namespace noiselab
