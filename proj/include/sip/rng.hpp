#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>

namespace sip {

/// Counter-based random streams built on Philox4x32-10 (Salmon et al., SC'11).
/// Every draw is a pure function of (seed, stream coordinates, block index),
/// so any sample can be regenerated in isolation and independent streams
/// never share a counter.
namespace rng {

struct PhiloxBlock {
  std::array<std::uint32_t, 4> word;
};

inline PhiloxBlock philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kWeylA = 0x9E3779B9u;
  constexpr std::uint32_t kWeylB = 0xBB67AE85u;
  constexpr std::uint32_t kMulA = 0xD2511F53u;
  constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return PhiloxBlock{ctr};
}

/// Addressable sub-stream of one seed. `hi` packs the oracle kind / slot /
/// constraint index, `lo` the iteration counter; `block` enumerates draws.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;

  PhiloxBlock block(std::uint32_t block_index) const {
    return philox4x32({lo, hi, block_index, 0u},
                      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  }
};

inline double to_unit(std::uint32_t a, std::uint32_t b) {
  // 53 uniform bits -> (0, 1]; keeps log() in Box-Muller finite.
  const std::uint64_t bits = ((static_cast<std::uint64_t>(a) << 32) | b) >> 11;
  return static_cast<double>(bits + 1) * 0x1.0p-53;
}

/// n iid uniforms on (0, 1].
inline Eigen::VectorXd uniforms(const StreamKey& key, Eigen::Index n) {
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; i += 2) {
    const PhiloxBlock blk = key.block(static_cast<std::uint32_t>(i / 2));
    out[i] = to_unit(blk.word[0], blk.word[1]);
    if (i + 1 < n) out[i + 1] = to_unit(blk.word[2], blk.word[3]);
  }
  return out;
}

/// n iid standard normals via Box-Muller on counter blocks.
inline Eigen::VectorXd normals(const StreamKey& key, Eigen::Index n) {
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; i += 2) {
    const PhiloxBlock blk = key.block(static_cast<std::uint32_t>(i / 2));
    const double u1 = to_unit(blk.word[0], blk.word[1]);
    const double u2 = to_unit(blk.word[2], blk.word[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    out[i] = r * std::cos(2.0 * M_PI * u2);
    if (i + 1 < n) out[i + 1] = r * std::sin(2.0 * M_PI * u2);
  }
  return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace rng
}  // namespace sip
