#include "imcdse/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "imcdse/errors.hpp"

namespace imcdse {

namespace {

double combine(ObjectiveForm form, double energy, double latency, double area) {
  switch (form) {
    case ObjectiveForm::EnergyLatencyArea: return energy * latency * area;
    case ObjectiveForm::EnergyLatency: return energy * latency;
    case ObjectiveForm::EnergyDelaySquaredArea: return energy * latency * latency * area;
  }
  return kInfeasibleScore;
}

Score infeasible(InfeasibleReason r) {
  Score s;
  s.reason = r;
  return s;
}

bool violates_area(double area, const ObjectiveSpec& spec) {
  return spec.area_constraint && area > *spec.area_constraint;
}

}  // namespace

std::string_view to_string(ObjectiveForm f) {
  switch (f) {
    case ObjectiveForm::EnergyLatencyArea: return "ela";
    case ObjectiveForm::EnergyLatency: return "el";
    case ObjectiveForm::EnergyDelaySquaredArea: return "ed2a";
  }
  return "?";
}

ObjectiveForm objective_form_from_string(std::string_view s) {
  if (s == "ela") return ObjectiveForm::EnergyLatencyArea;
  if (s == "el") return ObjectiveForm::EnergyLatency;
  if (s == "ed2a") return ObjectiveForm::EnergyDelaySquaredArea;
  throw ArgumentError("unknown objective '" + std::string(s) + "' (expected ela, el or ed2a)");
}

void validate_objective(const ObjectiveSpec& spec) {
  if (spec.area_constraint && !(*spec.area_constraint > 0.0)) {
    throw ArgumentError("area constraint must be > 0");
  }
}

Score score_single(const Metrics& m, const ObjectiveSpec& spec) {
  Evaluation e{m, InfeasibleReason::None};
  return score_joint(std::span<const Evaluation>(&e, 1), m.area, spec);
}

Score score_joint(std::span<const Evaluation> per_workload, double area, const ObjectiveSpec& spec) {
  if (per_workload.empty()) throw ArgumentError("score_joint: empty workload list");

  double max_energy = 0.0;
  double max_latency = 0.0;
  for (const Evaluation& e : per_workload) {
    if (!e.feasible()) {
      Score s = infeasible(e.reason);
      s.per_workload.assign(per_workload.begin(), per_workload.end());
      return s;
    }
    max_energy = std::max(max_energy, e.metrics->energy);
    max_latency = std::max(max_latency, e.metrics->latency);
  }

  Score s;
  s.per_workload.assign(per_workload.begin(), per_workload.end());
  if (violates_area(area, spec)) {
    s.reason = InfeasibleReason::Area;
    return s;
  }
  s.value = combine(spec.form, max_energy, max_latency, area);
  s.feasible = true;
  return s;
}

}  // namespace imcdse
