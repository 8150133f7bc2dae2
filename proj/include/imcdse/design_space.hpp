#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "imcdse/rng.hpp"

namespace imcdse {

/// The nine searched chip parameters, in genome order.
enum class Param : std::size_t {
  XbarRows,
  XbarCols,
  CPerTile,
  TPerRouter,
  GPerChip,
  VOp,
  BitsCell,
  TCycle,
  Glb,
};

inline constexpr std::size_t kNumParams = 9;

/// Space-file key for each parameter (t_cycle in ns, glb in KiB).
std::string_view param_key(Param p);

/// One chip configuration. t_cycle is kept in nanoseconds and the global
/// buffer in bytes so that level values stay exact.
struct HardwareConfig {
  std::int64_t xbar_rows = 0;
  std::int64_t xbar_cols = 0;
  std::int64_t c_per_tile = 0;
  std::int64_t t_per_router = 0;
  std::int64_t g_per_chip = 0;
  double v_op = 0.0;
  int bits_cell = 0;
  double t_cycle_ns = 0.0;
  std::int64_t glb_bytes = 0;

  double t_cycle_s() const { return t_cycle_ns * 1e-9; }
  std::int64_t total_tiles() const { return g_per_chip * t_per_router; }
  std::int64_t total_crossbars() const { return total_tiles() * c_per_tile; }

  /// Values in Param order, glb in bytes, t_cycle in ns.
  std::array<double, kNumParams> values() const;
  static HardwareConfig from_values(const std::array<double, kNumParams>& v);

  bool operator==(const HardwareConfig&) const = default;
  auto operator<=>(const HardwareConfig&) const = default;
};

using Genome = std::array<double, kNumParams>;

class SearchSpace {
 public:
  SearchSpace() = default;
  /// levels[p] holds ascending values in HardwareConfig units (glb in bytes).
  explicit SearchSpace(std::array<std::vector<double>, kNumParams> levels);

  const std::vector<double>& levels(Param p) const {
    return levels_[static_cast<std::size_t>(p)];
  }
  const std::vector<double>& levels(std::size_t i) const { return levels_[i]; }

  /// The 6x6x6x6x8x8x4x5x8 grid shipped as data/spaces/default.json.
  static SearchSpace default_space();

  /// Config built from per-parameter level indices.
  HardwareConfig at(const std::array<std::size_t, kNumParams>& idx) const;

 private:
  std::array<std::vector<double>, kNumParams> levels_;
};

SearchSpace parse_space(std::string_view json_text);
SearchSpace load_space(const std::filesystem::path& path);
std::string serialize_space(const SearchSpace& space);

std::uint64_t space_size(const SearchSpace& space);

HardwareConfig decode(const Genome& genome, const SearchSpace& space);
Genome encode(const HardwareConfig& config, const SearchSpace& space);
Genome sample_random(const SearchSpace& space, Rng& rng);

/// Clamp every gene into [0, 1].
void clamp_genome(Genome& g);

/// Mixed-radix enumeration of the full level grid; `fn` receives each
/// config exactly once, first parameter varying slowest.
template <typename Fn>
void for_each_config(const SearchSpace& space, Fn&& fn) {
  std::array<std::size_t, kNumParams> idx{};
  const std::uint64_t n = space_size(space);
  for (std::uint64_t k = 0; k < n; ++k) {
    fn(space.at(idx));
    for (std::size_t p = kNumParams; p-- > 0;) {
      if (++idx[p] < space.levels(p).size()) break;
      idx[p] = 0;
    }
  }
}

std::string to_string(const HardwareConfig& c);

}  // namespace imcdse
