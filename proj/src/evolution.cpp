#include "imcdse/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "imcdse/errors.hpp"
#include "imcdse/parallel.hpp"

namespace imcdse {

namespace {

std::size_t pick_largest(const SearchSpace& space, const std::vector<Workload>& workloads) {
  const int max_bits = static_cast<int>(space.levels(Param::BitsCell).back());
  return largest_workload(workloads, max_bits);
}

std::vector<Individual> evaluate_all(const std::vector<Genome>& genomes, std::size_t generation,
                                     const SearchSpace& space,
                                     const std::vector<Workload>& workloads,
                                     const ObjectiveSpec& spec, const CostConstants& k,
                                     std::size_t threads) {
  std::vector<Individual> out(genomes.size());
  parallel_for(genomes.size(), threads, [&](std::size_t i) {
    Individual& ind = out[i];
    ind.genome = genomes[i];
    ind.config = decode(genomes[i], space);
    ind.score = score_config(ind.config, workloads, spec, k);
    ind.generation_born = generation;
  });
  return out;
}

void sort_by_score(std::vector<Individual>& pop) {
  std::stable_sort(pop.begin(), pop.end(),
                   [](const Individual& a, const Individual& b) { return better(a.score, b.score); });
}

}  // namespace

void validate_params(const GaParams& p) {
  if (p.population_size == 0 || p.population_size % 2 != 0) {
    throw ArgumentError("population size must be positive and even");
  }
  if (p.crossover_prob < 0.0 || p.crossover_prob > 1.0 || p.mutation_prob < 0.0 ||
      p.mutation_prob > 1.0) {
    throw ArgumentError("probabilities must lie in [0, 1]");
  }
  if (!(p.eta_crossover > 0.0) || !(p.eta_mutation > 0.0)) {
    throw ArgumentError("distribution indices must be positive");
  }
  if (p.tournament_size == 0) throw ArgumentError("tournament size must be positive");
}

Score score_config(const HardwareConfig& config, const std::vector<Workload>& workloads,
                   const ObjectiveSpec& spec, const CostConstants& k) {
  std::vector<Evaluation> evals;
  evals.reserve(workloads.size());
  for (const Workload& w : workloads) evals.push_back(evaluate(config, w, k));
  return score_joint(evals, estimate_area(config, k), spec);
}

std::vector<Genome> init_population(const SearchSpace& space, const Workload& largest,
                                    std::size_t population_size, const CostConstants& k, Rng& rng) {
  std::vector<Genome> pop;
  pop.reserve(population_size);
  const std::size_t max_rejections = 10'000 * population_size;
  std::size_t rejections = 0;
  while (pop.size() < population_size) {
    Genome g = sample_random(space, rng);
    if (map_workload(decode(g, space), largest, k).feasible) {
      pop.push_back(g);
      rejections = 0;
    } else if (++rejections >= max_rejections) {
      throw InitializationExhausted("no configuration in the search space accommodates workload '" +
                                    largest.name + "' after " + std::to_string(max_rejections) +
                                    " consecutive draws");
    }
  }
  return pop;
}

double sbx_beta(double u, double eta) {
  const double e = 1.0 / (eta + 1.0);
  return u <= 0.5 ? std::pow(2.0 * u, e) : std::pow(1.0 / (2.0 * (1.0 - u)), e);
}

double polynomial_delta(double u, double eta) {
  const double e = 1.0 / (eta + 1.0);
  return u < 0.5 ? std::pow(2.0 * u, e) - 1.0 : 1.0 - std::pow(2.0 * (1.0 - u), e);
}

const Individual& tournament_select(const std::vector<Individual>& pop, std::size_t size, Rng& rng) {
  const Individual* best = &pop[rng.index(pop.size())];
  for (std::size_t i = 1; i < size; ++i) {
    const Individual& cand = pop[rng.index(pop.size())];
    if (better(cand.score, best->score)) best = &cand;
  }
  return *best;
}

std::vector<Genome> initial_population_for(const SearchSpace& space,
                                           const std::vector<Workload>& workloads,
                                           const GaParams& params, const CostConstants& k) {
  if (workloads.empty()) throw ArgumentError("run_search: no workloads");
  Rng rng(params.seed);
  return init_population(space, workloads[pick_largest(space, workloads)], params.population_size,
                         k, rng);
}

History run_search(const SearchSpace& space, const std::vector<Workload>& workloads,
                   const ObjectiveSpec& spec, const GaParams& params, const CostConstants& k,
                   const std::optional<std::vector<Genome>>& initial) {
  if (workloads.empty()) throw ArgumentError("run_search: no workloads");
  validate_params(params);
  validate_objective(spec);
  const std::size_t P = params.population_size;

  // Single stream, drawn in a fixed order: initialization, then per
  // generation all selections, all crossovers, all mutations.
  Rng rng(params.seed);
  std::vector<Genome> genomes;
  if (initial) {
    if (initial->size() != P) throw ArgumentError("initial population size must equal P");
    genomes = *initial;
  } else {
    genomes = init_population(space, workloads[pick_largest(space, workloads)], P, k, rng);
  }

  History history;
  history.population_size = P;
  history.generations = params.generations;
  history.records.reserve(P * (params.generations + 1));

  std::vector<Individual> population =
      evaluate_all(genomes, 0, space, workloads, spec, k, params.threads);
  history.records.insert(history.records.end(), population.begin(), population.end());
  sort_by_score(population);

  for (std::size_t gen = 1; gen <= params.generations; ++gen) {
    std::vector<Genome> mating;
    mating.reserve(P);
    for (std::size_t i = 0; i < P; ++i) {
      mating.push_back(tournament_select(population, params.tournament_size, rng).genome);
    }

    std::vector<Genome> offspring;
    offspring.reserve(P);
    for (std::size_t i = 0; i + 1 < P; i += 2) {
      if (rng.u01() < params.crossover_prob) {
        auto [c1, c2] = sbx_crossover(mating[i], mating[i + 1], params.eta_crossover, rng);
        offspring.push_back(c1);
        offspring.push_back(c2);
      } else {
        offspring.push_back(mating[i]);
        offspring.push_back(mating[i + 1]);
      }
    }

    for (Genome& child : offspring) {
      for (double& gene : child) {
        if (rng.u01() < params.mutation_prob) {
          gene = polynomial_mutation(gene, params.eta_mutation, rng);
        }
      }
    }

    std::vector<Individual> children =
        evaluate_all(offspring, gen, space, workloads, spec, k, params.threads);
    history.records.insert(history.records.end(), children.begin(), children.end());

    // Elitist (mu + lambda): parents ahead of offspring so ties favour parents.
    population.insert(population.end(), children.begin(), children.end());
    sort_by_score(population);
    population.resize(P);
  }
  return history;
}

std::vector<Individual> top_k(const History& history, std::size_t k) {
  std::set<HardwareConfig> seen;
  std::vector<Individual> distinct;
  for (const Individual& ind : history.records) {
    if (seen.insert(ind.config).second) distinct.push_back(ind);
  }
  sort_by_score(distinct);
  if (distinct.size() > k) distinct.resize(k);
  return distinct;
}

std::vector<double> convergence(const History& history) {
  std::vector<double> best(history.generations + 1, kInfeasibleScore);
  for (const Individual& ind : history.records) {
    if (ind.generation_born < best.size()) {
      best[ind.generation_born] = std::min(best[ind.generation_born], ind.score.value);
    }
  }
  for (std::size_t g = 1; g < best.size(); ++g) best[g] = std::min(best[g], best[g - 1]);
  return best;
}

}  // namespace imcdse
