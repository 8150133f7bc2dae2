#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace imcdse {

/// Seeded pseudorandom stream with implementation-independent draws.
///
/// std::uniform_real_distribution is not specified bit-for-bit across
/// standard libraries, so draws are derived from the raw 64-bit engine
/// output directly.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm =
      "mt19937_64; u01=(x>>11)*2^-53; index=floor(u01*n)";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., n-1}; n must be positive.
  std::size_t index(std::size_t n) {
    auto i = static_cast<std::size_t>(u01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace imcdse
