#include "imcdse/experiment.hpp"

#include <algorithm>
#include <chrono>

#include "imcdse/errors.hpp"
#include "imcdse/parallel.hpp"

namespace imcdse {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

RunReport make_report(std::string label, const ExperimentSetup& setup,
                      std::vector<Workload> workloads, const GaParams& params, bool shared_init,
                      std::uint64_t init_seed,
                      const std::optional<std::vector<Genome>>& initial) {
  const auto start = std::chrono::steady_clock::now();
  RunReport r;
  r.label = std::move(label);
  for (const auto& w : workloads) r.workload_names.push_back(w.name);
  r.workloads = std::move(workloads);
  r.params = params;
  r.objective = setup.objective;
  r.space = setup.space;
  r.constants = setup.constants;
  r.shared_init = shared_init;
  r.init_seed = init_seed;
  r.history = run_search(r.space, r.workloads, r.objective, r.params, r.constants, initial);
  r.top = top_k(r.history, setup.top_k);
  r.wall_seconds = seconds_since(start);
  return r;
}

}  // namespace

RunReport run_joint(const ExperimentSetup& setup) {
  if (setup.workloads.empty()) throw ArgumentError("run_joint: no workloads");
  return make_report("joint", setup, setup.workloads, setup.params, false, setup.params.seed,
                     std::nullopt);
}

std::vector<RunReport> run_separate(const ExperimentSetup& setup, bool shared_init) {
  if (setup.workloads.empty()) throw ArgumentError("run_separate: no workloads");
  std::optional<std::vector<Genome>> initial;
  if (shared_init) {
    initial = initial_population_for(setup.space, setup.workloads, setup.params, setup.constants);
  }
  std::vector<RunReport> out;
  for (std::size_t i = 0; i < setup.workloads.size(); ++i) {
    GaParams params = setup.params;
    if (!shared_init) params.seed = setup.params.seed + i;
    out.push_back(make_report("separate:" + setup.workloads[i].name, setup, {setup.workloads[i]},
                              params, shared_init, params.seed, initial));
  }
  return out;
}

std::vector<CrossEvalRow> designs_from(const RunReport& report) {
  std::vector<CrossEvalRow> rows;
  for (const Individual& ind : report.top) {
    CrossEvalRow row;
    row.source = report.label;
    row.config = ind.config;
    rows.push_back(std::move(row));
  }
  return rows;
}

CrossEvalTable cross_evaluate(std::string label, const std::vector<CrossEvalRow>& designs,
                              const std::vector<Workload>& workloads, const ObjectiveSpec& spec,
                              const CostConstants& k, std::size_t threads) {
  if (workloads.empty()) throw ArgumentError("cross_evaluate: no workloads");
  CrossEvalTable table;
  table.label = std::move(label);
  for (const auto& w : workloads) table.workload_names.push_back(w.name);
  table.rows = designs;
  parallel_for(table.rows.size(), threads, [&](std::size_t i) {
    CrossEvalRow& row = table.rows[i];
    row.cells.clear();
    for (const Workload& w : workloads) row.cells.push_back(evaluate(row.config, w, k));
    row.area = estimate_area(row.config, k);
    row.recalculated = score_joint(row.cells, row.area, spec);
  });
  return table;
}

double failed_fraction(const CrossEvalTable& table) {
  if (table.rows.empty()) throw ArgumentError("failed_fraction: empty table");
  const auto failed = std::count_if(table.rows.begin(), table.rows.end(), [](const CrossEvalRow& r) {
    return std::any_of(r.cells.begin(), r.cells.end(),
                       [](const Evaluation& e) { return !e.feasible(); });
  });
  return 100.0 * static_cast<double>(failed) / static_cast<double>(table.rows.size());
}

std::optional<double> score_loss_percent(const Score& joint_recalc, const Score& specific_best) {
  if (!joint_recalc.feasible || !specific_best.feasible) return std::nullopt;
  return 100.0 * (1.0 - specific_best.value / joint_recalc.value);
}

std::vector<ScoreLoss> score_loss_report(const RunReport& joint,
                                         const std::vector<RunReport>& separate) {
  std::vector<ScoreLoss> out;
  for (const RunReport& s : separate) {
    ScoreLoss loss;
    loss.workload = s.workload_names.front();
    Score specific;
    if (!s.top.empty()) specific = s.top.front().score;
    Score recalc;
    if (!joint.top.empty()) {
      recalc = score_config(joint.top.front().config, s.workloads, s.objective, s.constants);
    }
    loss.specific_best = specific.value;
    loss.joint_recalc = recalc.value;
    loss.loss_percent = score_loss_percent(recalc, specific);
    out.push_back(std::move(loss));
  }
  return out;
}

OracleResult brute_force_oracle(const SearchSpace& space, const std::vector<Workload>& workloads,
                                const ObjectiveSpec& spec, const CostConstants& k,
                                std::size_t threads) {
  const std::uint64_t n = space_size(space);
  if (n > kOracleLimit) {
    throw SpaceTooLarge("oracle: search space has " + std::to_string(n) +
                        " configurations (limit " + std::to_string(kOracleLimit) +
                        "); shrink the space file");
  }
  if (workloads.empty()) throw ArgumentError("oracle: no workloads");
  validate_objective(spec);

  OracleResult result;
  result.dump.reserve(n);
  for_each_config(space, [&](const HardwareConfig& c) { result.dump.emplace_back(c, Score{}); });
  parallel_for(result.dump.size(), threads, [&](std::size_t i) {
    result.dump[i].second = score_config(result.dump[i].first, workloads, spec, k);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.dump.size(); ++i) {
    if (better(result.dump[i].second, result.dump[best].second)) best = i;
  }
  result.best = result.dump[best].first;
  result.best_score = result.dump[best].second;
  return result;
}

ProtocolResult run_protocol(const ExperimentSetup& setup) {
  ProtocolResult r;
  r.joint = run_joint(setup);
  r.separate = run_separate(setup, false);
  r.separate_shared = run_separate(setup, true);
  for (auto& rep : r.separate_shared) rep.label += "+shared";

  const std::size_t threads = setup.params.threads;
  r.tables.push_back(cross_evaluate("joint", designs_from(r.joint), setup.workloads,
                                    setup.objective, setup.constants, threads));
  for (const RunReport& s : r.separate) {
    r.tables.push_back(cross_evaluate(s.label, designs_from(s), setup.workloads, setup.objective,
                                      setup.constants, threads));
  }
  r.losses = score_loss_report(r.joint, r.separate_shared);
  return r;
}

}  // namespace imcdse
