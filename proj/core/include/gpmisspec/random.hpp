#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace gpmisspec {

/// Philox4x32-10 counter-based generator. Every draw is a pure function of
/// (seed, stream, index), so results do not depend on evaluation order or on
/// how work is split across threads.
class CounterRng {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit CounterRng(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  /// Raw Philox4x32-10 bijection of a counter under a key.
  static Block philox(Block ctr, std::array<std::uint32_t, 2> key) noexcept {
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += w0;
      key[1] += w1;
    }
    return ctr;
  }

  [[nodiscard]] Block block(std::uint64_t stream, std::uint64_t index) const noexcept {
    return philox({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                   static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
                  key_);
  }

  /// Uniform on the open interval (0, 1).
  [[nodiscard]] double uniform(std::uint64_t stream, std::uint64_t index) const noexcept {
    const Block b = block(stream, index / 2);
    return to_unit(index % 2 == 0 ? b[0] : b[2], index % 2 == 0 ? b[1] : b[3]);
  }

  /// Standard normal via Box-Muller; indices 2k and 2k+1 share one block.
  [[nodiscard]] double normal(std::uint64_t stream, std::uint64_t index) const noexcept {
    const Block b = block(stream, index / 2);
    const double u1 = to_unit(b[0], b[1]);
    const double u2 = to_unit(b[2], b[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return radius * (index % 2 == 0 ? std::cos(angle) : std::sin(angle));
  }

 private:
  static double to_unit(std::uint32_t lo, std::uint32_t hi) noexcept {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  std::array<std::uint32_t, 2> key_;
};

}  // namespace gpmisspec
