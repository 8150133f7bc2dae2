#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "imcdse/errors.hpp"
#include "imcdse/experiment.hpp"

using namespace imcdse;

namespace {

const std::filesystem::path kData = IMCDSE_DATA_DIR;

ExperimentSetup small_setup(std::uint64_t seed = 0) {
  ExperimentSetup s;
  s.workloads = load_workloads({kData / "workloads"});
  s.objective = {ObjectiveForm::EnergyLatencyArea, 4500.0};
  s.params.population_size = 10;
  s.params.generations = 3;
  s.params.seed = seed;
  return s;
}

CrossEvalRow row_with(std::vector<Evaluation> cells) {
  CrossEvalRow r;
  r.cells = std::move(cells);
  return r;
}

Score feasible_score(double v) {
  Score s;
  s.value = v;
  s.feasible = true;
  return s;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("imcdse_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("run_joint and run_separate shape") {
  const auto setup = small_setup();
  const auto joint = run_joint(setup);
  CHECK(joint.label == "joint");
  CHECK(joint.history.records.size() == 10 * 4);
  CHECK(joint.top.size() <= 10);

  const auto sep = run_separate(setup);
  REQUIRE(sep.size() == 4);
  for (std::size_t i = 0; i < sep.size(); ++i) {
    CHECK(sep[i].label == "separate:" + setup.workloads[i].name);
    CHECK(sep[i].params.seed == i);
    CHECK(sep[i].workload_names == std::vector<std::string>{setup.workloads[i].name});
  }

  const auto shared = run_separate(setup, true);
  const auto joint_init = initial_population_for(setup.space, setup.workloads, setup.params,
                                                 setup.constants);
  for (const auto& r : shared) {
    CHECK(r.shared_init);
    CHECK(r.params.seed == setup.params.seed);
    for (std::size_t i = 0; i < 10; ++i) CHECK(r.history.records[i].genome == joint_init[i]);
  }
}

TEST_CASE("a one-workload joint run equals the separate run") {
  auto setup = small_setup(3);
  setup.workloads = {setup.workloads[2]};
  const auto joint = run_joint(setup);
  const auto sep = run_separate(setup);
  REQUIRE(sep.size() == 1);
  auto relabeled = sep[0];
  relabeled.label = joint.label;
  CHECK(history_csv({joint}) == history_csv({relabeled}));
}

TEST_CASE("cross_evaluate") {
  const auto setup = small_setup();
  const auto joint = run_joint(setup);
  const auto table = cross_evaluate("joint", designs_from(joint), setup.workloads, setup.objective,
                                    setup.constants);
  REQUIRE(table.rows.size() == joint.top.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    CHECK(row.cells.size() == 4);
    CHECK(row.recalculated.value == joint.top[i].score.value);
    CHECK(row.recalculated.value == score_joint(row.cells, row.area, setup.objective).value);
  }

  // One design, one workload: the cell is evaluate() itself.
  CrossEvalRow one;
  one.config = joint.top.front().config;
  const auto single = cross_evaluate("x", {one}, {setup.workloads[0]}, setup.objective,
                                     setup.constants);
  CHECK(single.rows[0].cells[0] == evaluate(one.config, setup.workloads[0], setup.constants));

  // A design that cannot hold anything scores +inf.
  CrossEvalRow tiny;
  tiny.config = decode(Genome{}, setup.space);
  const auto bad = cross_evaluate("bad", {tiny}, setup.workloads, setup.objective, setup.constants);
  CHECK(bad.rows[0].recalculated.value == kInfeasibleScore);
  CHECK(failed_fraction(bad) == 100.0);
}

TEST_CASE("failed_fraction arithmetic") {
  const Evaluation good{Metrics{1, 1, 1}, InfeasibleReason::None};
  const Evaluation fail = Evaluation::infeasible(InfeasibleReason::Capacity);
  CrossEvalTable t;
  t.workload_names = {"a", "b"};
  for (int i = 0; i < 10; ++i) t.rows.push_back(row_with({good, good}));
  CHECK(failed_fraction(t) == 0.0);
  t.rows[3] = row_with({good, fail});
  t.rows[7] = row_with({fail, fail});
  CHECK(failed_fraction(t) == 20.0);
  for (auto& r : t.rows) r = row_with({fail, good});
  CHECK(failed_fraction(t) == 100.0);
  CHECK_THROWS_AS(failed_fraction(CrossEvalTable{}), ArgumentError);
}

TEST_CASE("score loss") {
  CHECK(*score_loss_percent(feasible_score(100), feasible_score(100)) == 0.0);
  CHECK(*score_loss_percent(feasible_score(100), feasible_score(50)) == 50.0);
  CHECK_FALSE(score_loss_percent(Score{}, feasible_score(50)).has_value());

  const auto setup = small_setup();
  const auto joint = run_joint(setup);
  const auto losses = score_loss_report(joint, run_separate(setup, true));
  REQUIRE(losses.size() == 4);
  for (std::size_t i = 0; i < losses.size(); ++i) {
    CHECK(losses[i].workload == setup.workloads[i].name);
    const auto direct = score_config(joint.top.front().config, {setup.workloads[i]},
                                     setup.objective, setup.constants);
    CHECK(losses[i].joint_recalc == direct.value);
  }
}

TEST_CASE("brute_force_oracle") {
  const auto setup = small_setup();
  CHECK_THROWS_AS(brute_force_oracle(setup.space, setup.workloads, setup.objective, setup.constants),
                  SpaceTooLarge);

  std::array<std::vector<double>, kNumParams> lv = {
      std::vector<double>{1024}, {256}, {64}, {64}, {64}, {1.0}, {4}, {1}, {8192.0 * 1024}};
  const SearchSpace one(lv);
  const auto r = brute_force_oracle(one, setup.workloads, {}, setup.constants);
  CHECK(r.dump.size() == 1);
  CHECK(r.best == one.at({}));
  CHECK(r.best_score.value == score_config(r.best, setup.workloads, {}, setup.constants).value);

  const auto tiny = load_space(std::filesystem::path(IMCDSE_TEST_DATA) / "tiny_space.json");
  const auto a = brute_force_oracle(tiny, setup.workloads, setup.objective, setup.constants);
  const auto b = brute_force_oracle(tiny, setup.workloads, setup.objective, setup.constants, 3);
  CHECK(a.dump.size() == 512);
  CHECK(a.best == b.best);
  for (const auto& [cfg, score] : a.dump) CHECK(a.best_score.value <= score.value);
}

TEST_CASE("emit_reports writes every file") {
  const auto setup = small_setup();
  const auto joint = run_joint(setup);
  const auto table = cross_evaluate("joint", designs_from(joint), setup.workloads, setup.objective,
                                    setup.constants);
  const auto dir = scratch("emit");
  emit_reports({joint}, {table}, dir);
  for (const char* f : {"history.csv", "topk.json", "crosseval.csv", "convergence.svg"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  CHECK(count_lines(read_text_file(dir / "history.csv")) == 1 + 40);
  CHECK(count_lines(read_text_file(dir / "crosseval.csv")) == 1 + table.rows.size());
  CHECK(read_text_file(dir / "convergence.svg").find("data-run=\"joint\"") != std::string::npos);

  // Empty top-k still yields well-formed files with headers.
  RunReport empty = joint;
  empty.top.clear();
  const auto dir2 = scratch("empty");
  emit_reports({empty}, {}, dir2);
  const auto cross = read_text_file(dir2 / "crosseval.csv");
  CHECK(count_lines(cross) == 1);
  CHECK(cross.rfind("table,design,source", 0) == 0);
  CHECK(designs_from_topk_json(read_text_file(dir2 / "topk.json")).empty());
}

TEST_CASE("history.csv rows re-score exactly") {
  const auto setup = small_setup(2);
  const auto joint = run_joint(setup);
  const auto seps = run_separate(setup);
  std::vector<RunReport> all = {joint};
  all.insert(all.end(), seps.begin(), seps.end());
  const auto rows = parse_history_csv(history_csv(all));
  REQUIRE(rows.size() == 40 * 5);
  for (const auto& row : rows) {
    std::vector<Workload> ws;
    for (const auto& r : all) {
      if (r.label == row.run) ws = r.workloads;
    }
    const auto s = score_config(row.config, ws, setup.objective, setup.constants);
    CHECK(s.value == row.score);
    CHECK(s.feasible == row.feasible);
    CHECK(estimate_area(row.config, setup.constants) == row.area);
  }
}

TEST_CASE("replays are byte-identical apart from wall clock") {
  const auto setup = small_setup(5);
  const auto a = run_joint(setup);
  const auto b = run_joint(setup);
  CHECK(report_to_json({a}, false) == report_to_json({b}, false));
  CHECK(history_csv({a}) == history_csv({b}));

  // The report carries enough to rebuild the designs.
  const auto designs = designs_from_topk_json(report_to_json({a}));
  REQUIRE(designs.size() == a.top.size());
  for (std::size_t i = 0; i < designs.size(); ++i) CHECK(designs[i].config == a.top[i].config);
}

TEST_CASE("number and config serialization") {
  for (double v : {0.1, 1e-300, 123456789.123, 2.0 / 3.0}) CHECK(parse_number(format_number(v)) == v);
  CHECK(format_number(kInfeasibleScore) == "inf");
  CHECK(parse_number("inf") == kInfeasibleScore);
  const auto c = decode(Genome{0.3, 0.9, 0.1, 0.5, 0.7, 0.2, 0.8, 0.4, 0.6}, SearchSpace::default_space());
  CHECK(parse_config(serialize_config(c)) == c);
}
