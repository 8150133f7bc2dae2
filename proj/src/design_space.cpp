#include "imcdse/design_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "imcdse/errors.hpp"

namespace imcdse {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kNumParams> kKeys = {
    "xbar_rows", "xbar_cols", "c_per_tile", "t_per_router", "g_per_chip",
    "v_op",      "bits_cell", "t_cycle_ns", "glb_kib",
};

// Space-file unit -> HardwareConfig unit.
double file_scale(std::size_t p) { return p == static_cast<std::size_t>(Param::Glb) ? 1024.0 : 1.0; }

bool is_integral_param(std::size_t p) {
  auto param = static_cast<Param>(p);
  return param != Param::VOp && param != Param::TCycle;
}

std::size_t level_index(double gene, std::size_t n) {
  auto i = static_cast<std::size_t>(std::floor(gene * static_cast<double>(n)));
  return std::min(i, n - 1);
}

}  // namespace

std::string_view param_key(Param p) { return kKeys[static_cast<std::size_t>(p)]; }

std::array<double, kNumParams> HardwareConfig::values() const {
  return {static_cast<double>(xbar_rows),    static_cast<double>(xbar_cols),
          static_cast<double>(c_per_tile),   static_cast<double>(t_per_router),
          static_cast<double>(g_per_chip),   v_op,
          static_cast<double>(bits_cell),    t_cycle_ns,
          static_cast<double>(glb_bytes)};
}

HardwareConfig HardwareConfig::from_values(const std::array<double, kNumParams>& v) {
  HardwareConfig c;
  c.xbar_rows = std::llround(v[0]);
  c.xbar_cols = std::llround(v[1]);
  c.c_per_tile = std::llround(v[2]);
  c.t_per_router = std::llround(v[3]);
  c.g_per_chip = std::llround(v[4]);
  c.v_op = v[5];
  c.bits_cell = static_cast<int>(std::lround(v[6]));
  c.t_cycle_ns = v[7];
  c.glb_bytes = std::llround(v[8]);
  return c;
}

SearchSpace::SearchSpace(std::array<std::vector<double>, kNumParams> levels)
    : levels_(std::move(levels)) {
  for (std::size_t p = 0; p < kNumParams; ++p) {
    const auto& lv = levels_[p];
    const std::string key(kKeys[p]);
    if (lv.empty()) throw ValidationError("search space: '" + key + "' has no levels");
    for (std::size_t i = 0; i < lv.size(); ++i) {
      if (!(lv[i] > 0.0) || !std::isfinite(lv[i])) {
        throw ValidationError("search space: '" + key + "' levels must be finite and > 0");
      }
      if (i > 0 && !(lv[i] > lv[i - 1])) {
        throw ValidationError("search space: '" + key + "' levels must be strictly ascending");
      }
      if (is_integral_param(p) && lv[i] != std::floor(lv[i])) {
        throw ValidationError("search space: '" + key + "' levels must be integers");
      }
    }
  }
}

SearchSpace SearchSpace::default_space() {
  std::array<std::vector<double>, kNumParams> lv;
  lv[0] = {32, 64, 128, 256, 512, 1024};
  lv[1] = lv[0];
  lv[2] = {2, 4, 8, 16, 32, 64};
  lv[3] = lv[2];
  lv[4] = {2, 4, 8, 16, 32, 64, 128, 256};
  lv[5] = {0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2};
  lv[6] = {1, 2, 3, 4};
  lv[7] = {1, 2, 4, 8, 16};
  for (double kib = 64; kib <= 8192; kib *= 2) lv[8].push_back(kib * 1024.0);
  return SearchSpace(std::move(lv));
}

HardwareConfig SearchSpace::at(const std::array<std::size_t, kNumParams>& idx) const {
  std::array<double, kNumParams> v{};
  for (std::size_t p = 0; p < kNumParams; ++p) v[p] = levels_[p].at(idx[p]);
  return HardwareConfig::from_values(v);
}

SearchSpace parse_space(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("search space: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("search space: top level must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw ParseError("search space: unknown field '" + key + "'");
    }
  }
  std::array<std::vector<double>, kNumParams> lv;
  for (std::size_t p = 0; p < kNumParams; ++p) {
    const std::string key(kKeys[p]);
    auto it = doc.find(key);
    if (it == doc.end()) throw ParseError("search space: missing field '" + key + "'");
    if (!it->is_array()) throw ParseError("search space: '" + key + "' must be an array");
    for (const auto& v : *it) {
      if (!v.is_number()) throw ParseError("search space: '" + key + "' must hold numbers");
      lv[p].push_back(v.get<double>() * file_scale(p));
    }
  }
  return SearchSpace(std::move(lv));
}

SearchSpace load_space(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open search space file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_space(ss.str());
}

std::string serialize_space(const SearchSpace& space) {
  json doc = json::object();
  for (std::size_t p = 0; p < kNumParams; ++p) {
    json arr = json::array();
    for (double v : space.levels(p)) {
      const double fv = v / file_scale(p);
      if (is_integral_param(p)) {
        arr.push_back(std::llround(fv));
      } else {
        arr.push_back(fv);
      }
    }
    doc[std::string(kKeys[p])] = std::move(arr);
  }
  return doc.dump();
}

std::uint64_t space_size(const SearchSpace& space) {
  std::uint64_t n = 1;
  for (std::size_t p = 0; p < kNumParams; ++p) n *= space.levels(p).size();
  return n;
}

HardwareConfig decode(const Genome& genome, const SearchSpace& space) {
  std::array<std::size_t, kNumParams> idx{};
  for (std::size_t p = 0; p < kNumParams; ++p) {
    idx[p] = level_index(std::clamp(genome[p], 0.0, 1.0), space.levels(p).size());
  }
  return space.at(idx);
}

Genome encode(const HardwareConfig& config, const SearchSpace& space) {
  const auto values = config.values();
  Genome g{};
  for (std::size_t p = 0; p < kNumParams; ++p) {
    const auto& lv = space.levels(p);
    auto it = std::find(lv.begin(), lv.end(), values[p]);
    if (it == lv.end()) {
      throw ArgumentError("encode: value of '" + std::string(kKeys[p]) +
                          "' is not a level of the search space");
    }
    const auto i = static_cast<double>(it - lv.begin());
    g[p] = (i + 0.5) / static_cast<double>(lv.size());
  }
  return g;
}

Genome sample_random(const SearchSpace&, Rng& rng) {
  Genome g{};
  for (double& gene : g) gene = rng.u01();
  return g;
}

void clamp_genome(Genome& g) {
  for (double& gene : g) gene = std::clamp(gene, 0.0, 1.0);
}

std::string to_string(const HardwareConfig& c) {
  std::ostringstream os;
  os << "xbar=" << c.xbar_rows << "x" << c.xbar_cols << " c/tile=" << c.c_per_tile
     << " t/router=" << c.t_per_router << " groups=" << c.g_per_chip << " v=" << c.v_op
     << "V bits/cell=" << c.bits_cell << " t_cycle=" << c.t_cycle_ns
     << "ns glb=" << c.glb_bytes / 1024 << "KiB";
  return os.str();
}

}  // namespace imcdse
