#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imcdse/design_space.hpp"
#include "imcdse/workload.hpp"

namespace imcdse {

/// Calibration constants of the analytical model, SI units. Energies are
/// quoted at v_nom and scale with (v_op / v_nom)^2.
struct CostConstants {
  double v_nom = 1.0;          // V
  double v_th = 0.3;           // V
  double f_ref = 1e9;          // Hz at v_nom
  double e_cell = 50e-15;      // J per active cell per input bit-slice
  double e_adc = 2e-12;        // J per 8-bit conversion
  double e_buf = 0.5e-12;      // J/byte, tile buffer
  double e_glb = 1e-12;        // J/byte, global buffer
  double e_route = 1e-12;      // J/(byte*hop)
  double a_cell = 3e-7;        // mm^2 per RRAM cell
  double a_adc = 1.5e-3;       // mm^2 per ADC
  double a_router = 5e-3;      // mm^2
  double a_glb = 2e-7;         // mm^2/byte
  double tile_overhead = 0.2;  // drivers, buffers, control as a fraction of tile array area
  std::int64_t cols_per_adc = 8;
  std::int64_t glb_width = 32;  // bytes/cycle

  bool operator==(const CostConstants&) const = default;
};

void validate_constants(const CostConstants& k);
/// Missing fields keep their defaults; unknown fields are a ParseError.
CostConstants parse_constants(std::string_view json_text);
CostConstants load_constants(const std::filesystem::path& path);
std::string serialize_constants(const CostConstants& k);

enum class InfeasibleReason { None, Timing, Capacity, Buffer, Area };

std::string_view to_string(InfeasibleReason r);
InfeasibleReason reason_from_string(std::string_view s);

struct MappingResult {
  std::vector<std::int64_t> layer_crossbars;
  std::int64_t total_crossbars_used = 0;
  std::int64_t peak_activation_bytes = 0;
  bool feasible = false;
  InfeasibleReason reason = InfeasibleReason::None;
};

struct Metrics {
  double energy = 0.0;   // J
  double latency = 0.0;  // s
  double area = 0.0;     // mm^2

  bool operator==(const Metrics&) const = default;
};

/// Result of evaluating one workload on one config: metrics when the
/// workload fits, otherwise the first failed condition.
struct Evaluation {
  std::optional<Metrics> metrics;
  InfeasibleReason reason = InfeasibleReason::None;

  bool feasible() const { return metrics.has_value(); }
  static Evaluation infeasible(InfeasibleReason r) { return {std::nullopt, r}; }

  bool operator==(const Evaluation&) const = default;
};

/// Highest clock the supply voltage sustains:
/// f_ref * ((v - v_th) / (v_nom - v_th))^2 * (v_nom / v).
double max_frequency(double v_op, const CostConstants& k);
bool check_timing(const HardwareConfig& config, const CostConstants& k);

/// Crossbars needed by one layer: replicas * ceil(rows/xbar_rows) * ceil(cols/xbar_cols).
std::int64_t layer_crossbars(const Layer& layer, const HardwareConfig& config, int weight_bits);

/// Reason order: capacity, buffer, timing.
MappingResult map_workload(const HardwareConfig& config, const Workload& w,
                           const CostConstants& k = {});

double estimate_area(const HardwareConfig& config, const CostConstants& k);
/// Throws ContractViolation on an infeasible mapping.
double estimate_latency(const HardwareConfig& config, const MappingResult& mapping,
                        const Workload& w, const CostConstants& k);
/// Throws ContractViolation on an infeasible mapping.
double estimate_energy(const HardwareConfig& config, const MappingResult& mapping,
                       const Workload& w, const CostConstants& k);

/// Timing is checked before the mapping, so a timing failure always wins.
Evaluation evaluate(const HardwareConfig& config, const Workload& w, const CostConstants& k);

}  // namespace imcdse
