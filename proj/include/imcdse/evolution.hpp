#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "imcdse/cost_model.hpp"
#include "imcdse/design_space.hpp"
#include "imcdse/objective.hpp"
#include "imcdse/rng.hpp"
#include "imcdse/workload.hpp"

namespace imcdse {

struct GaParams {
  std::size_t population_size = 40;
  std::size_t generations = 10;
  double crossover_prob = 0.95;
  double eta_crossover = 3.0;
  double eta_mutation = 3.0;
  double mutation_prob = 1.0 / static_cast<double>(kNumParams);
  std::size_t tournament_size = 2;
  std::uint64_t seed = 0;
  /// Worker threads for evaluation only; results do not depend on it.
  std::size_t threads = 1;
};

void validate_params(const GaParams& p);

struct Individual {
  Genome genome{};
  HardwareConfig config;
  Score score;
  std::size_t generation_born = 0;
};

/// Every evaluation of a run, in evaluation order: the P initial
/// individuals (generation 0) followed by P offspring per generation.
struct History {
  std::vector<Individual> records;
  std::size_t population_size = 0;
  std::size_t generations = 0;
};

/// Scores one config against a workload set. A single workload reduces to
/// score_single semantics.
Score score_config(const HardwareConfig& config, const std::vector<Workload>& workloads,
                   const ObjectiveSpec& spec, const CostConstants& k);

/// Rejection-samples P genomes whose decoded config can hold `largest`.
/// Throws InitializationExhausted after 10,000 * P consecutive rejections.
std::vector<Genome> init_population(const SearchSpace& space, const Workload& largest,
                                    std::size_t population_size, const CostConstants& k, Rng& rng);

/// Anything that yields uniform [0, 1) draws; Rng in production, scripted
/// sequences in tests.
template <typename S>
concept UniformSource = requires(S& s) {
  { s.u01() } -> std::convertible_to<double>;
};

/// Spread factor for a given uniform draw.
double sbx_beta(double u, double eta);
/// Perturbation for a given uniform draw.
double polynomial_delta(double u, double eta);

/// Deb's simulated binary crossover, one u draw per gene; children clamped to [0, 1].
template <UniformSource S>
std::pair<Genome, Genome> sbx_crossover(const Genome& p1, const Genome& p2, double eta, S& draws) {
  Genome c1{}, c2{};
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const double beta = sbx_beta(draws.u01(), eta);
    c1[i] = 0.5 * ((1.0 + beta) * p1[i] + (1.0 - beta) * p2[i]);
    c2[i] = 0.5 * ((1.0 - beta) * p1[i] + (1.0 + beta) * p2[i]);
  }
  clamp_genome(c1);
  clamp_genome(c2);
  return {c1, c2};
}

/// Polynomial mutation of one gene on [0, 1]; the step is delta * (upper - lower).
template <UniformSource S>
double polynomial_mutation(double gene, double eta, S& draws) {
  return std::clamp(gene + polynomial_delta(draws.u01(), eta), 0.0, 1.0);
}

/// `size` uniform draws with replacement; the best score wins, ties keep
/// the earliest draw.
const Individual& tournament_select(const std::vector<Individual>& pop, std::size_t size, Rng& rng);

/// Genetic search. When `initial` is given it replaces the feasibility-filtered
/// random initialization (used for shared-initialization comparisons).
History run_search(const SearchSpace& space, const std::vector<Workload>& workloads,
                   const ObjectiveSpec& spec, const GaParams& params, const CostConstants& k,
                   const std::optional<std::vector<Genome>>& initial = std::nullopt);

/// The initial population run_search would draw for this input and seed.
std::vector<Genome> initial_population_for(const SearchSpace& space,
                                           const std::vector<Workload>& workloads,
                                           const GaParams& params, const CostConstants& k);

/// First occurrence of each config, stable-sorted by score, truncated to k.
std::vector<Individual> top_k(const History& history, std::size_t k);

/// Best score among all records born at or before each generation
/// (size G + 1). Under elitist survival this is the survivors' best.
std::vector<double> convergence(const History& history);

}  // namespace imcdse
