#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "imcdse/cost_model.hpp"

namespace imcdse {

/// Which metric product the score uses. Energy and latency are the
/// worst-case values across the workloads being scored.
enum class ObjectiveForm {
  EnergyLatencyArea,       // E * L * A
  EnergyLatency,           // E * L
  EnergyDelaySquaredArea,  // E * L^2 * A
};

std::string_view to_string(ObjectiveForm f);
/// Accepts the CLI spellings "ela", "el", "ed2a".
ObjectiveForm objective_form_from_string(std::string_view s);

struct ObjectiveSpec {
  ObjectiveForm form = ObjectiveForm::EnergyLatencyArea;
  std::optional<double> area_constraint;  // mm^2; nullopt = unconstrained

  bool operator==(const ObjectiveSpec&) const = default;
};

void validate_objective(const ObjectiveSpec& spec);

inline constexpr double kInfeasibleScore = std::numeric_limits<double>::infinity();

/// Lower is better. Infeasible scores carry +inf.
struct Score {
  double value = kInfeasibleScore;
  bool feasible = false;
  InfeasibleReason reason = InfeasibleReason::None;
  std::vector<Evaluation> per_workload;
};

Score score_single(const Metrics& m, const ObjectiveSpec& spec);

/// max_w(E_w) and max_w(L_w) are taken independently, then combined with
/// the (workload-independent) area. Throws ArgumentError on an empty list.
Score score_joint(std::span<const Evaluation> per_workload, double area, const ObjectiveSpec& spec);

inline bool better(const Score& a, const Score& b) { return a.value < b.value; }

}  // namespace imcdse
