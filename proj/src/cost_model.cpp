#include "imcdse/cost_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "imcdse/errors.hpp"

namespace imcdse {

using nlohmann::json;

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// ceil(log2(g)), 0 for a single group.
std::int64_t routing_hops(std::int64_t g_per_chip) {
  if (g_per_chip <= 1) return 0;
  return std::bit_width(static_cast<std::uint64_t>(g_per_chip - 1));
}

double voltage_scale(const HardwareConfig& c, const CostConstants& k) {
  const double r = c.v_op / k.v_nom;
  return r * r;
}

void require_feasible(const MappingResult& m, const char* what) {
  if (!m.feasible) {
    throw ContractViolation(std::string(what) + " requires a feasible mapping");
  }
}

// Ordered list of fields for (de)serialization.
struct DoubleField {
  const char* name;
  double CostConstants::*member;
};
struct IntField {
  const char* name;
  std::int64_t CostConstants::*member;
};

constexpr DoubleField kDoubleFields[] = {
    {"v_nom", &CostConstants::v_nom},         {"v_th", &CostConstants::v_th},
    {"f_ref", &CostConstants::f_ref},         {"e_cell", &CostConstants::e_cell},
    {"e_adc", &CostConstants::e_adc},         {"e_buf", &CostConstants::e_buf},
    {"e_glb", &CostConstants::e_glb},         {"e_route", &CostConstants::e_route},
    {"a_cell", &CostConstants::a_cell},       {"a_adc", &CostConstants::a_adc},
    {"a_router", &CostConstants::a_router},   {"a_glb", &CostConstants::a_glb},
    {"tile_overhead", &CostConstants::tile_overhead},
};
constexpr IntField kIntFields[] = {
    {"cols_per_adc", &CostConstants::cols_per_adc},
    {"glb_width", &CostConstants::glb_width},
};

}  // namespace

std::string_view to_string(InfeasibleReason r) {
  switch (r) {
    case InfeasibleReason::None: return "";
    case InfeasibleReason::Timing: return "timing";
    case InfeasibleReason::Capacity: return "capacity";
    case InfeasibleReason::Buffer: return "buffer";
    case InfeasibleReason::Area: return "area";
  }
  return "";
}

InfeasibleReason reason_from_string(std::string_view s) {
  if (s.empty()) return InfeasibleReason::None;
  if (s == "timing") return InfeasibleReason::Timing;
  if (s == "capacity") return InfeasibleReason::Capacity;
  if (s == "buffer") return InfeasibleReason::Buffer;
  if (s == "area") return InfeasibleReason::Area;
  throw ParseError("unknown infeasibility reason '" + std::string(s) + "'");
}

void validate_constants(const CostConstants& k) {
  for (const auto& f : kDoubleFields) {
    const double v = k.*f.member;
    if (!std::isfinite(v)) throw ValidationError(std::string("constants: ") + f.name + " must be finite");
    if (f.member != &CostConstants::tile_overhead && !(v > 0.0)) {
      throw ValidationError(std::string("constants: ") + f.name + " must be > 0");
    }
  }
  for (const auto& f : kIntFields) {
    if (k.*f.member < 1) throw ValidationError(std::string("constants: ") + f.name + " must be >= 1");
  }
  if (!(k.v_th < k.v_nom)) throw ValidationError("constants: v_th must be below v_nom");
  if (k.tile_overhead < 0.0 || k.tile_overhead > 1.0) {
    throw ValidationError("constants: tile_overhead must lie in [0, 1]");
  }
}

CostConstants parse_constants(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("constants: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("constants: top level must be an object");
  CostConstants k;
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const auto& f : kDoubleFields) {
      if (key == f.name) {
        if (!value.is_number()) throw ParseError("constants: '" + key + "' must be a number");
        k.*f.member = value.get<double>();
        known = true;
      }
    }
    for (const auto& f : kIntFields) {
      if (key == f.name) {
        if (!value.is_number_integer()) {
          throw ParseError("constants: '" + key + "' must be an integer");
        }
        k.*f.member = value.get<std::int64_t>();
        known = true;
      }
    }
    if (!known) throw ParseError("constants: unknown field '" + key + "'");
  }
  validate_constants(k);
  return k;
}

CostConstants load_constants(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open constants file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_constants(ss.str());
}

std::string serialize_constants(const CostConstants& k) {
  json doc = json::object();
  for (const auto& f : kDoubleFields) doc[f.name] = k.*f.member;
  for (const auto& f : kIntFields) doc[f.name] = k.*f.member;
  return doc.dump();
}

double max_frequency(double v_op, const CostConstants& k) {
  if (v_op <= k.v_th) return 0.0;
  const double r = (v_op - k.v_th) / (k.v_nom - k.v_th);
  return k.f_ref * r * r * (k.v_nom / v_op);
}

bool check_timing(const HardwareConfig& config, const CostConstants& k) {
  // 1/t_cycle <= f_max, compared as a product so that decimal levels such as
  // 1 ns at exactly f_ref are not rejected by rounding.
  return config.t_cycle_s() * max_frequency(config.v_op, k) >= 1.0 - 1e-12;
}

std::int64_t layer_crossbars(const Layer& layer, const HardwareConfig& config, int weight_bits) {
  const StorageDemand d = layer_storage_demand(layer, config.bits_cell, weight_bits);
  return d.replicas * ceil_div(d.rows_req, config.xbar_rows) * ceil_div(d.cols_req, config.xbar_cols);
}

MappingResult map_workload(const HardwareConfig& config, const Workload& w, const CostConstants& k) {
  MappingResult m;
  m.layer_crossbars.reserve(w.layers.size());
  for (const Layer& l : w.layers) {
    const std::int64_t n = layer_crossbars(l, config, w.weight_bits);
    m.layer_crossbars.push_back(n);
    m.total_crossbars_used += n;
    m.peak_activation_bytes =
        std::max(m.peak_activation_bytes, layer_activation_bytes(l, w.activation_bits).total());
  }
  if (m.total_crossbars_used > config.total_crossbars()) {
    m.reason = InfeasibleReason::Capacity;
  } else if (m.peak_activation_bytes > config.glb_bytes) {
    m.reason = InfeasibleReason::Buffer;
  } else if (!check_timing(config, k)) {
    m.reason = InfeasibleReason::Timing;
  }
  m.feasible = m.reason == InfeasibleReason::None;
  return m;
}

double estimate_area(const HardwareConfig& c, const CostConstants& k) {
  const double crossbar = static_cast<double>(c.xbar_rows * c.xbar_cols) * k.a_cell +
                          static_cast<double>(ceil_div(c.xbar_cols, k.cols_per_adc)) * k.a_adc;
  const double tile = static_cast<double>(c.c_per_tile) * crossbar;
  return static_cast<double>(c.total_tiles()) * (1.0 + k.tile_overhead) * tile +
         static_cast<double>(c.g_per_chip) * k.a_router +
         static_cast<double>(c.glb_bytes) * k.a_glb;
}

double estimate_latency(const HardwareConfig& c, const MappingResult& mapping, const Workload& w,
                        const CostConstants& k) {
  require_feasible(mapping, "estimate_latency");
  // Bit-serial inputs, and each ADC serves cols_per_adc columns in turn.
  const std::int64_t cycles_per_mvm = w.activation_bits * k.cols_per_adc;
  std::int64_t cycles = 0;
  for (const Layer& l : w.layers) {
    cycles += layer_mvm_count(l) * cycles_per_mvm +
              ceil_div(layer_activation_bytes(l, w.activation_bits).total(), k.glb_width);
  }
  return static_cast<double>(cycles) * c.t_cycle_s();
}

double estimate_energy(const HardwareConfig& c, const MappingResult& mapping, const Workload& w,
                       const CostConstants& k) {
  require_feasible(mapping, "estimate_energy");
  const double hops = static_cast<double>(routing_hops(c.g_per_chip));
  const double bits = w.activation_bits;
  double total = 0.0;
  for (const Layer& l : w.layers) {
    const StorageDemand d = layer_storage_demand(l, c.bits_cell, w.weight_bits);
    const ActivationBytes act = layer_activation_bytes(l, w.activation_bits);
    const double cols = static_cast<double>(d.cols_req * d.replicas);
    const double cell = static_cast<double>(d.rows_req) * cols * bits * k.e_cell;
    const double adc = cols * bits * k.e_adc;
    const double buffer = static_cast<double>(act.total()) * (k.e_buf + k.e_glb);
    const double route = static_cast<double>(act.output_bytes) * hops * k.e_route;
    total += static_cast<double>(layer_mvm_count(l)) * (cell + adc) + buffer + route;
  }
  return total * voltage_scale(c, k);
}

Evaluation evaluate(const HardwareConfig& config, const Workload& w, const CostConstants& k) {
  if (!check_timing(config, k)) return Evaluation::infeasible(InfeasibleReason::Timing);
  const MappingResult m = map_workload(config, w, k);
  if (!m.feasible) return Evaluation::infeasible(m.reason);
  return {Metrics{estimate_energy(config, m, w, k), estimate_latency(config, m, w, k),
                  estimate_area(config, k)},
          InfeasibleReason::None};
}

}  // namespace imcdse
