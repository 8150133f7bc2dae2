#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imcdse/cost_model.hpp"
#include "imcdse/design_space.hpp"
#include "imcdse/evolution.hpp"
#include "imcdse/objective.hpp"
#include "imcdse/workload.hpp"

namespace imcdse {

/// Everything needed to replay one search plus its outcome.
struct RunReport {
  std::string label;  // "joint" or "separate:<workload>"
  std::vector<std::string> workload_names;
  std::vector<Workload> workloads;
  GaParams params;
  ObjectiveSpec objective;
  SearchSpace space;
  CostConstants constants;
  bool shared_init = false;
  std::uint64_t init_seed = 0;  // seed whose initialization was used
  History history;
  std::vector<Individual> top;
  double wall_seconds = 0.0;
};

struct CrossEvalRow {
  std::string source;  // label of the run the design came from
  HardwareConfig config;
  std::vector<Evaluation> cells;  // one per workload, table order
  double area = 0.0;
  Score recalculated;  // score_joint over the row
};

struct CrossEvalTable {
  std::string label;
  std::vector<std::string> workload_names;
  std::vector<CrossEvalRow> rows;
};

struct ScoreLoss {
  std::string workload;
  std::optional<double> loss_percent;  // nullopt when either score is infeasible
  double specific_best = kInfeasibleScore;
  double joint_recalc = kInfeasibleScore;
};

struct OracleResult {
  HardwareConfig best;
  Score best_score;
  std::vector<std::pair<HardwareConfig, Score>> dump;  // enumeration order
};

/// Options shared by every search of one experiment.
struct ExperimentSetup {
  SearchSpace space = SearchSpace::default_space();
  std::vector<Workload> workloads;
  ObjectiveSpec objective;
  GaParams params;
  CostConstants constants;
  std::size_t top_k = 10;
};

RunReport run_joint(const ExperimentSetup& setup);

/// One search per workload with seed = base seed + workload index. With
/// shared_init, every search instead starts from the joint search's initial
/// population and seed.
std::vector<RunReport> run_separate(const ExperimentSetup& setup, bool shared_init = false);

CrossEvalTable cross_evaluate(std::string label, const std::vector<CrossEvalRow>& designs,
                              const std::vector<Workload>& workloads, const ObjectiveSpec& spec,
                              const CostConstants& k, std::size_t threads = 1);

/// Rows seeded from a report's top-k designs (cells not yet evaluated).
std::vector<CrossEvalRow> designs_from(const RunReport& report);

/// Percentage of rows with at least one infeasible cell. Throws on an empty table.
double failed_fraction(const CrossEvalTable& table);

/// 100 * (1 - specific_best / joint_recalc); nullopt if either is infeasible.
std::optional<double> score_loss_percent(const Score& joint_recalc, const Score& specific_best);

/// Per workload: the joint winner re-scored on that workload alone against
/// the best design of that workload's separate search.
std::vector<ScoreLoss> score_loss_report(const RunReport& joint,
                                         const std::vector<RunReport>& separate);

inline constexpr std::uint64_t kOracleLimit = 1'000'000;

/// Exhaustive evaluation of the whole space. Throws SpaceTooLarge beyond kOracleLimit.
OracleResult brute_force_oracle(const SearchSpace& space, const std::vector<Workload>& workloads,
                                const ObjectiveSpec& spec, const CostConstants& k,
                                std::size_t threads = 1);

/// Joint search, separate searches, cross-evaluation of every run's top-k,
/// and the score-loss analysis (separate searches rerun from the joint
/// initial population for that comparison).
struct ProtocolResult {
  RunReport joint;
  std::vector<RunReport> separate;
  std::vector<RunReport> separate_shared;
  std::vector<CrossEvalTable> tables;  // joint first, then one per separate run
  std::vector<ScoreLoss> losses;
};

ProtocolResult run_protocol(const ExperimentSetup& setup);

// ---- serialization ---------------------------------------------------------

/// %.17g, with "inf" for the infeasible sentinel.
std::string format_number(double v);
double parse_number(std::string_view s);

/// Config as a flat object using the space-file keys (t_cycle_ns, glb_kib).
std::string serialize_config(const HardwareConfig& c);
HardwareConfig parse_config(std::string_view json_text);

std::string report_to_json(const std::vector<RunReport>& reports, bool include_wall_clock = true);
/// Rows for every top-k design in a topk.json document.
std::vector<CrossEvalRow> designs_from_topk_json(std::string_view json_text);

/// Fixed columns, then E_<w>,L_<w> per workload (union across runs, first-seen order).
std::string history_csv(const std::vector<RunReport>& reports);
std::string crosseval_csv(const std::vector<CrossEvalTable>& tables);
std::string oracle_csv(const OracleResult& oracle, const std::vector<Workload>& workloads);

struct HistoryRow {
  std::string run;
  std::size_t generation = 0;
  std::size_t index = 0;
  HardwareConfig config;
  std::vector<std::pair<std::string, std::optional<Metrics>>> per_workload;
  double area = 0.0;
  double score = kInfeasibleScore;
  bool feasible = false;
  std::string reason;
};

std::vector<HistoryRow> parse_history_csv(std::string_view text);

struct ConvergenceSeries {
  std::string label;
  std::vector<double> best;  // per generation, +inf until a feasible design is found
};

std::vector<ConvergenceSeries> convergence_from_history(const std::vector<HistoryRow>& rows);
std::string convergence_svg(const std::vector<ConvergenceSeries>& series);

/// Writes history.csv, topk.json, crosseval.csv and convergence.svg into out_dir.
void emit_reports(const std::vector<RunReport>& reports, const std::vector<CrossEvalTable>& tables,
                  const std::filesystem::path& out_dir);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace imcdse
