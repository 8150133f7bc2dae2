#include <doctest.h>

#include <cmath>
#include <deque>
#include <random>

#include "imcdse/errors.hpp"
#include "imcdse/evolution.hpp"
#include "imcdse/experiment.hpp"

using namespace imcdse;

namespace {

const std::filesystem::path kData = IMCDSE_DATA_DIR;

// Replays a fixed list of uniform draws.
struct Scripted {
  std::deque<double> values;
  double u01() {
    REQUIRE_FALSE(values.empty());
    const double v = values.front();
    values.pop_front();
    return v;
  }
};

Scripted repeat(double u, std::size_t n = kNumParams) { return {std::deque<double>(n, u)}; }

Genome filled(double v) {
  Genome g;
  g.fill(v);
  return g;
}

const std::vector<Workload>& shipped() {
  static const auto ws = load_workloads({kData / "workloads"});
  return ws;
}

SearchSpace single_config_space(double rows, double c_per_tile) {
  std::array<std::vector<double>, kNumParams> lv = {
      std::vector<double>{rows}, {rows}, {c_per_tile}, {64}, {256}, {1.0}, {4}, {1}, {8192.0 * 1024}};
  return SearchSpace(std::move(lv));
}

Individual with_score(double v, std::int64_t rows = 32) {
  Individual ind;
  ind.config.xbar_rows = rows;
  ind.score.value = v;
  ind.score.feasible = std::isfinite(v);
  return ind;
}

bool same_history(const History& a, const History& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& x = a.records[i];
    const auto& y = b.records[i];
    if (x.genome != y.genome || x.config != y.config || x.generation_born != y.generation_born ||
        x.score.value != y.score.value || x.score.per_workload != y.score.per_workload) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("sbx_crossover examples") {
  const Genome p1 = filled(0.2), p2 = filled(0.8);

  auto half = repeat(0.5);
  auto [a, b] = sbx_crossover(p1, p2, 3.0, half);
  CHECK(a == p1);
  CHECK(b == p2);

  auto draws = repeat(0.2);
  auto [c1, c2] = sbx_crossover(p1, p2, 3.0, draws);
  CHECK(std::pow(0.4, 0.25) == doctest::Approx(0.79527).epsilon(1e-5));
  for (std::size_t i = 0; i < kNumParams; ++i) {
    CHECK(std::abs(c1[i] - 0.26142) < 1e-4);
    CHECK(std::abs(c2[i] - 0.73858) < 1e-4);
  }

  Rng rng(1);
  const Genome same = filled(0.37);
  auto [s1, s2] = sbx_crossover(same, same, 3.0, rng);
  for (std::size_t i = 0; i < kNumParams; ++i) {
    CHECK(s1[i] == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(s2[i] == doctest::Approx(0.37).epsilon(1e-15));
  }
}

TEST_CASE("sbx_crossover preserves the parent mean when nothing clamps") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Rng rng(9);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    Genome p1, p2;
    for (std::size_t i = 0; i < kNumParams; ++i) {
      p1[i] = unit(gen);
      p2[i] = unit(gen);
    }
    // Replay the same draws unclamped to know which genes stayed inside.
    Scripted draws;
    for (std::size_t i = 0; i < kNumParams; ++i) draws.values.push_back(rng.u01());
    const auto copy = draws;
    auto [c1, c2] = sbx_crossover(p1, p2, 3.0, draws);
    for (std::size_t i = 0; i < kNumParams; ++i) {
      const double beta = sbx_beta(copy.values[i], 3.0);
      const double r1 = 0.5 * ((1 + beta) * p1[i] + (1 - beta) * p2[i]);
      const double r2 = 0.5 * ((1 - beta) * p1[i] + (1 + beta) * p2[i]);
      if (r1 < 0 || r1 > 1 || r2 < 0 || r2 > 1) continue;
      ++checked;
      CHECK(std::abs((c1[i] + c2[i]) - (p1[i] + p2[i])) < 1e-12);
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("polynomial_mutation examples") {
  auto half = repeat(0.5, 1);
  CHECK(polynomial_mutation(0.3, 3.0, half) == 0.3);
  CHECK(polynomial_delta(0.5, 3.0) == 0.0);

  auto small = repeat(0.0625, 1);
  CHECK(std::abs(polynomial_delta(0.0625, 3.0) - (-0.40539)) < 1e-4);
  CHECK(std::abs(polynomial_mutation(0.5, 3.0, small) - 0.09461) < 1e-4);

  for (double u : {0.0, 0.1, 0.3, 0.49}) {
    auto d = repeat(u, 1);
    CHECK(polynomial_mutation(0.0, 3.0, d) == 0.0);
  }
  auto top = repeat(0.99, 1);
  CHECK(polynomial_mutation(1.0, 3.0, top) == 1.0);
}

TEST_CASE("tournament_select") {
  Rng rng(0);
  const std::vector<Individual> one = {with_score(5)};
  CHECK(&tournament_select(one, 2, rng) == &one[0]);

  // Find seeds whose two draws over a pair of individuals are (0,1) and (1,0).
  auto seed_for = [](std::size_t first, std::size_t second) {
    for (std::uint64_t s = 0;; ++s) {
      Rng r(s);
      const auto a = r.index(2);
      const auto b = r.index(2);
      if (a == first && b == second) return s;
    }
  };
  const std::vector<Individual> mixed = {with_score(kInfeasibleScore), with_score(60)};
  for (auto s : {seed_for(0, 1), seed_for(1, 0)}) {
    Rng r(s);
    CHECK(tournament_select(mixed, 2, r).score.value == 60);
  }

  const std::vector<Individual> tied = {with_score(7, 32), with_score(7, 64)};
  Rng r(seed_for(1, 0));
  CHECK(tournament_select(tied, 2, r).config.xbar_rows == 64);

  Rng x(77), y(77);
  const std::vector<Individual> many = {with_score(3), with_score(1), with_score(2), with_score(9)};
  for (int i = 0; i < 20; ++i) CHECK(&tournament_select(many, 2, x) == &tournament_select(many, 2, y));
}

TEST_CASE("init_population") {
  const CostConstants k;
  const Workload& vgg = shipped()[3];

  // Every config holds VGG16: the first P raw samples come back untouched.
  const auto roomy = single_config_space(1024, 64);
  Rng a(3), b(3);
  const auto pop = init_population(roomy, vgg, 6, k, a);
  REQUIRE(pop.size() == 6);
  for (const Genome& g : pop) CHECK(g == sample_random(roomy, b));

  const auto cramped = single_config_space(32, 2);
  Rng c(3);
  CHECK_THROWS_AS(init_population(cramped, vgg, 2, k, c), InitializationExhausted);

  const auto space = SearchSpace::default_space();
  Rng s1(7), s2(7);
  const auto p1 = init_population(space, vgg, 40, k, s1);
  CHECK(p1 == init_population(space, vgg, 40, k, s2));
  for (const Genome& g : p1) CHECK(map_workload(decode(g, space), vgg, k).feasible);
}

TEST_CASE("run_search bookkeeping") {
  const auto space = SearchSpace::default_space();
  const CostConstants k;
  const ObjectiveSpec spec{ObjectiveForm::EnergyLatencyArea, 4500.0};
  GaParams p;
  p.population_size = 8;
  p.generations = 0;
  p.seed = 4;
  CHECK(run_search(space, shipped(), spec, p, k).records.size() == 8);

  p.generations = 6;
  const auto h = run_search(space, shipped(), spec, p, k);
  CHECK(h.records.size() == 8 * 7);
  for (std::size_t i = 0; i < h.records.size(); ++i) {
    const auto& r = h.records[i];
    CHECK(r.generation_born == i / 8);
    CHECK(r.config == decode(r.genome, space));
    for (double gene : r.genome) {
      CHECK(gene >= 0.0);
      CHECK(gene <= 1.0);
    }
  }

  // Reproducible, and the evaluation thread count does not matter.
  CHECK(same_history(h, run_search(space, shipped(), spec, p, k)));
  auto threaded = p;
  threaded.threads = 4;
  CHECK(same_history(h, run_search(space, shipped(), spec, threaded, k)));

  const auto curve = convergence(h);
  REQUIRE(curve.size() == 7);
  for (std::size_t g = 1; g < curve.size(); ++g) CHECK(curve[g] <= curve[g - 1]);

  GaParams odd = p;
  odd.population_size = 7;
  CHECK_THROWS_AS(run_search(space, shipped(), spec, odd, k), ArgumentError);
  CHECK_THROWS_AS(run_search(space, {}, spec, p, k), ArgumentError);
}

TEST_CASE("a one-workload search scores with the single-workload objective") {
  const auto space = SearchSpace::default_space();
  const CostConstants k;
  const ObjectiveSpec spec;
  GaParams p;
  p.population_size = 6;
  p.generations = 2;
  const std::vector<Workload> alex = {shipped()[0]};
  const auto h = run_search(space, alex, spec, p, k);
  for (const auto& r : h.records) {
    const auto e = evaluate(r.config, alex[0], k);
    const double expect = e.feasible() ? score_single(*e.metrics, spec).value : kInfeasibleScore;
    CHECK(r.score.value == expect);
  }
}

TEST_CASE("top_k") {
  History h;
  h.population_size = 2;
  h.generations = 5;
  auto rec = [](double v, std::int64_t rows, std::size_t gen) {
    auto ind = with_score(v, rows);
    ind.generation_born = gen;
    return ind;
  };
  h.records = {rec(5, 32, 0), rec(kInfeasibleScore, 64, 0), rec(3, 128, 2), rec(3, 128, 5)};
  const auto top = top_k(h, 10);
  REQUIRE(top.size() == 3);
  CHECK(top[0].config.xbar_rows == 128);
  CHECK(top[0].generation_born == 2);
  CHECK(top[1].score.value == 5);
  CHECK(top[2].score.value == kInfeasibleScore);
  CHECK(top_k(h, 1).size() == 1);
  CHECK(top_k(h, 1)[0].score.value == 3);
}

TEST_CASE("search on the tiny space never beats the exhaustive optimum") {
  const auto space = load_space(std::filesystem::path(IMCDSE_TEST_DATA) / "tiny_space.json");
  const CostConstants k;
  const ObjectiveSpec spec{ObjectiveForm::EnergyLatencyArea, 4500.0};
  const auto oracle = brute_force_oracle(space, shipped(), spec, k);
  CHECK(oracle.dump.size() == 512);
  GaParams p;
  p.population_size = 16;
  p.generations = 30;
  const auto h = run_search(space, shipped(), spec, p, k);
  for (const auto& r : h.records) CHECK(oracle.best_score.value <= r.score.value);
}
