// Command-line driver: joint and separate searches, cross-evaluation,
// exhaustive oracle and report regeneration.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "imcdse/errors.hpp"
#include "imcdse/experiment.hpp"

namespace fs = std::filesystem;
using namespace imcdse;

namespace {

const fs::path kDataDir = IMCDSE_DATA_DIR;

// Area limit shipped with the default constants; see README "Area constraint".
constexpr double kDefaultAreaLimit = 4500.0;

struct CommonOptions {
  std::string space;
  std::vector<std::string> workloads;
  std::string constants;
  std::string objective = "ela";
  double area_limit = kDefaultAreaLimit;
  bool unconstrained = false;
  std::size_t threads = 1;
};

void add_model_options(CLI::App* cmd, CommonOptions& o, bool with_space, bool with_workloads) {
  if (with_space) {
    cmd->add_option("--space", o.space, "Search-space JSON (default: built-in grid)");
  }
  if (with_workloads) {
    cmd->add_option("--workloads", o.workloads, "Workload JSON files or directories")
        ->default_str((kDataDir / "workloads").string());
  }
  cmd->add_option("--constants", o.constants, "Cost-model constants JSON");
  cmd->add_option("--objective", o.objective, "Objective form: ela, el or ed2a")
      ->check(CLI::IsMember({"ela", "el", "ed2a"}));
  cmd->add_option("--area-limit", o.area_limit, "Area constraint in mm^2")
      ->default_val(kDefaultAreaLimit);
  cmd->add_flag("--unconstrained", o.unconstrained, "Disable the area constraint");
  cmd->add_option("--threads", o.threads, "Evaluation threads")->default_val(1);
}

SearchSpace space_of(const CommonOptions& o) {
  return o.space.empty() ? SearchSpace::default_space() : load_space(o.space);
}

std::vector<Workload> workloads_of(const CommonOptions& o) {
  std::vector<fs::path> paths(o.workloads.begin(), o.workloads.end());
  if (paths.empty()) paths.push_back(kDataDir / "workloads");
  auto ws = load_workloads(paths);
  if (ws.empty()) throw ArgumentError("no workloads found");
  return ws;
}

CostConstants constants_of(const CommonOptions& o) {
  return o.constants.empty() ? CostConstants{} : load_constants(o.constants);
}

ObjectiveSpec objective_of(const CommonOptions& o) {
  ObjectiveSpec spec;
  spec.form = objective_form_from_string(o.objective);
  if (!o.unconstrained) spec.area_constraint = o.area_limit;
  validate_objective(spec);
  return spec;
}

std::string score_text(double v) { return std::isfinite(v) ? format_number(v) : "infeasible"; }

void print_table_summary(const CrossEvalTable& t) {
  double best = kInfeasibleScore;
  for (const auto& r : t.rows) best = std::min(best, r.recalculated.value);
  std::printf("  %-28s designs=%-3zu failed=%6.2f%%  best recalculated=%s\n", t.label.c_str(),
              t.rows.size(), t.rows.empty() ? 0.0 : failed_fraction(t), score_text(best).c_str());
}

int cmd_search(const CommonOptions& o, const std::string& mode, GaParams params, std::size_t topk,
               bool shared_init, const std::string& out) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentSetup setup;
  setup.space = space_of(o);
  setup.workloads = workloads_of(o);
  setup.objective = objective_of(o);
  setup.constants = constants_of(o);
  params.threads = o.threads;
  setup.params = params;
  setup.top_k = topk;

  std::vector<RunReport> reports;
  std::vector<CrossEvalTable> tables;
  std::vector<ScoreLoss> losses;
  if (mode == "joint") {
    reports.push_back(run_joint(setup));
    tables.push_back(cross_evaluate("joint", designs_from(reports[0]), setup.workloads,
                                    setup.objective, setup.constants, o.threads));
  } else if (mode == "separate") {
    reports = run_separate(setup, shared_init);
    for (const auto& r : reports) {
      tables.push_back(cross_evaluate(r.label, designs_from(r), setup.workloads, setup.objective,
                                      setup.constants, o.threads));
    }
  } else {
    ProtocolResult p = run_protocol(setup);
    reports.push_back(std::move(p.joint));
    for (auto& r : p.separate) reports.push_back(std::move(r));
    for (auto& r : p.separate_shared) reports.push_back(std::move(r));
    tables = std::move(p.tables);
    losses = std::move(p.losses);
  }

  emit_reports(reports, tables, out);
  if (!losses.empty()) {
    std::string csv = "workload,specific_best,joint_recalc,loss_percent\n";
    for (const auto& l : losses) {
      csv += l.workload + "," + format_number(l.specific_best) + "," +
             format_number(l.joint_recalc) + "," +
             (l.loss_percent ? format_number(*l.loss_percent) : std::string("n/a")) + "\n";
    }
    write_text_file(fs::path(out) / "score_loss.csv", csv);
  }

  std::printf("space size %llu, %zu workload(s), objective %s, area limit %s\n",
              static_cast<unsigned long long>(space_size(setup.space)), setup.workloads.size(),
              o.objective.c_str(),
              setup.objective.area_constraint ? format_number(*setup.objective.area_constraint).c_str()
                                              : "none");
  for (const auto& r : reports) {
    std::printf("%-28s evaluations=%zu best=%s\n", r.label.c_str(), r.history.records.size(),
                score_text(r.top.empty() ? kInfeasibleScore : r.top.front().score.value).c_str());
  }
  std::printf("cross-evaluation on all workloads:\n");
  for (const auto& t : tables) print_table_summary(t);
  for (const auto& l : losses) {
    std::printf("  score loss vs %-14s %s\n", l.workload.c_str(),
                l.loss_percent ? (format_number(*l.loss_percent) + "%").c_str() : "n/a");
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("wrote %s (%.2f s)\n", out.c_str(), secs);
  return 0;
}

int cmd_evaluate(const CommonOptions& o, const std::string& config_arg) {
  const std::string text = fs::exists(config_arg) ? read_text_file(config_arg) : config_arg;
  const HardwareConfig config = parse_config(text);
  const auto workloads = workloads_of(o);
  const auto k = constants_of(o);
  const auto spec = objective_of(o);

  nlohmann::json out;
  out["config"] = nlohmann::json::parse(serialize_config(config));
  out["area_mm2"] = estimate_area(config, k);
  out["timing_ok"] = check_timing(config, k);
  for (const auto& w : workloads) {
    const Evaluation e = evaluate(config, w, k);
    if (e.feasible()) {
      out["workloads"][w.name] = {{"energy_j", e.metrics->energy},
                                  {"latency_s", e.metrics->latency},
                                  {"score", score_single(*e.metrics, spec).value}};
    } else {
      out["workloads"][w.name] = {{"infeasible", std::string(to_string(e.reason))}};
    }
  }
  const Score joint = score_config(config, workloads, spec, k);
  out["joint_score"] = joint.feasible ? nlohmann::json(joint.value) : nlohmann::json(nullptr);
  out["feasible"] = joint.feasible;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_crosseval(const CommonOptions& o, const std::string& designs_path, const std::string& out) {
  const auto designs = designs_from_topk_json(read_text_file(designs_path));
  const auto workloads = workloads_of(o);
  const auto table = cross_evaluate("crosseval", designs, workloads, objective_of(o),
                                    constants_of(o), o.threads);
  const std::string csv = crosseval_csv({table});
  if (out.empty()) {
    std::cout << csv;
  } else {
    fs::create_directories(out);
    write_text_file(fs::path(out) / "crosseval.csv", csv);
  }
  std::fprintf(stderr, "failed designs: %.2f%% of %zu\n",
               table.rows.empty() ? 0.0 : failed_fraction(table), table.rows.size());
  return 0;
}

int cmd_oracle(const CommonOptions& o, const std::string& out) {
  const auto space = space_of(o);
  const auto workloads = workloads_of(o);
  const auto start = std::chrono::steady_clock::now();
  const OracleResult r = brute_force_oracle(space, workloads, objective_of(o), constants_of(o), o.threads);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fs::create_directories(out);
  write_text_file(fs::path(out) / "oracle.csv", oracle_csv(r, workloads));
  nlohmann::json best = {{"config", nlohmann::json::parse(serialize_config(r.best))},
                         {"score", r.best_score.feasible ? nlohmann::json(r.best_score.value)
                                                         : nlohmann::json(nullptr)},
                         {"feasible", r.best_score.feasible},
                         {"evaluated", r.dump.size()}};
  write_text_file(fs::path(out) / "oracle_best.json", best.dump(2) + "\n");
  std::printf("evaluated %zu configurations in %.3f s\nbest: %s\nscore: %s\n", r.dump.size(), secs,
              to_string(r.best).c_str(), score_text(r.best_score.value).c_str());
  return 0;
}

int cmd_report(const std::string& in, const std::string& out) {
  const auto rows = parse_history_csv(read_text_file(fs::path(in) / "history.csv"));
  const auto series = convergence_from_history(rows);
  fs::create_directories(out);
  write_text_file(fs::path(out) / "convergence.svg", convergence_svg(series));
  std::string csv = "run,evaluations,feasible,best_score\n";
  for (const auto& s : series) {
    std::size_t n = 0, feasible = 0;
    for (const auto& r : rows) {
      if (r.run != s.label) continue;
      ++n;
      feasible += r.feasible ? 1 : 0;
    }
    csv += s.label + "," + std::to_string(n) + "," + std::to_string(feasible) + "," +
           format_number(s.best.empty() ? kInfeasibleScore : s.best.back()) + "\n";
  }
  write_text_file(fs::path(out) / "summary.csv", csv);
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint hardware-workload design-space exploration for IMC accelerators"};
  app.require_subcommand(1);

  CommonOptions search_opts;
  GaParams params;
  std::string mode = "joint", search_out = "out";
  std::size_t topk = 10;
  bool shared_init = false;
  auto* search = app.add_subcommand("search", "Run a genetic search");
  add_model_options(search, search_opts, true, true);
  search->add_option("--mode", mode, "joint, separate, or both (full comparison protocol)")
      ->check(CLI::IsMember({"joint", "separate", "both"}));
  search->add_option("--pop", params.population_size, "Population size P")->default_val(40);
  search->add_option("--gens", params.generations, "Generations G")->default_val(10);
  search->add_option("--seed", params.seed, "Base seed")->default_val(0);
  search->add_option("--pc", params.crossover_prob, "Crossover probability")->default_val(0.95);
  search->add_option("--eta-c", params.eta_crossover, "SBX distribution index")->default_val(3.0);
  search->add_option("--eta-m", params.eta_mutation, "Mutation distribution index")->default_val(3.0);
  search->add_option("--pm", params.mutation_prob, "Per-gene mutation probability");
  search->add_option("--tournament", params.tournament_size, "Tournament size")->default_val(2);
  search->add_option("--topk", topk, "Designs kept per run")->default_val(10);
  search->add_flag("--shared-init", shared_init,
                   "Separate searches start from the joint search's initial population");
  search->add_option("--out", search_out, "Output directory")->default_val("out");

  CommonOptions eval_opts;
  std::string config_arg;
  auto* eval = app.add_subcommand("evaluate", "Evaluate one configuration");
  eval->add_option("--space-config", config_arg, "Config JSON (inline or file)")->required();
  eval->add_option("--workload", eval_opts.workloads, "Workload file(s) or directory");
  add_model_options(eval, eval_opts, false, false);

  CommonOptions cross_opts;
  std::string designs, cross_out;
  auto* cross = app.add_subcommand("crosseval", "Evaluate top-k designs on every workload");
  cross->add_option("--designs", designs, "topk.json from a search")->required();
  add_model_options(cross, cross_opts, false, true);
  cross->add_option("--out", cross_out, "Output directory (default: stdout)");

  CommonOptions oracle_opts;
  std::string oracle_out = "oracle";
  auto* oracle = app.add_subcommand("oracle", "Exhaustively evaluate a small search space");
  add_model_options(oracle, oracle_opts, true, true);
  oracle->add_option("--out", oracle_out, "Output directory")->default_val("oracle");

  std::string report_in, report_out;
  auto* report = app.add_subcommand("report", "Rebuild plots and summary from history.csv");
  report->add_option("--in", report_in, "Directory holding history.csv")->required();
  report->add_option("--out", report_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*search) return cmd_search(search_opts, mode, params, topk, shared_init, search_out);
    if (*eval) return cmd_evaluate(eval_opts, config_arg);
    if (*cross) return cmd_crosseval(cross_opts, designs, cross_out);
    if (*oracle) return cmd_oracle(oracle_opts, oracle_out);
    if (*report) return cmd_report(report_in, report_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
