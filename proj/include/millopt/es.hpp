#pragma once

/// @file es.hpp
/// @brief Self-adaptive (mu, eta) evolution strategy over a box-bounded real
/// genome.
///
/// Each individual carries one mutation strength per component. Offspring are
/// produced by discrete recombination of the genome, intermediate
/// recombination of the strengths, and log-normal self-adaptive mutation:
///
///   sigma'_i = max(sigma_i * exp(tau_global * N(0,1) + tau_local * N_i(0,1)), floor)
///   x'_i     = clip(x_i + sigma'_i * N_i(0,1))
///
/// Survivors are the best mu children (parents are discarded). A best record
/// kept outside the population stops the run once it has not strictly improved
/// for `stall_limit` generations. Infeasible candidates are handled by the
/// fitness function (death penalty); the engine only ranks values.
///
/// Strengths are also capped at `sigma_cap_fraction` times the component's box
/// width. Without the cap, clipping rewards ever larger steps that land on the
/// box faces and sigma grows without bound.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "millopt/errors.hpp"
#include "millopt/model.hpp"

namespace millopt::es {

using Rng = std::mt19937_64;

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  [[nodiscard]] std::size_t size() const { return lower.size(); }
};

struct EsConfig {
  std::size_t mu = 15;
  std::size_t eta = 105;
  double sigma_init = 3.0;
  std::optional<double> tau_global;  // default 1/sqrt(2 l)
  std::optional<double> tau_local;   // default 1/sqrt(2 sqrt(l))
  double alpha = 0.5;
  std::size_t stall_limit = 1000;
  std::size_t max_generations = 100000;
  std::uint64_t seed = 42;
  double sigma_floor = 1e-6;
  std::optional<double> sigma_cap_fraction = 1.0;  // unset: no cap

  void validate() const {
    if (mu < 1) throw ContractError("mu must be >= 1");
    if (eta <= mu) throw ContractError("eta (lambda) must exceed mu");
    if (!(sigma_init > 0)) throw ContractError("sigma_init must be > 0");
    if (!(alpha > 0 && alpha < 1)) throw ContractError("alpha must be in (0, 1)");
    if (stall_limit < 1) throw ContractError("stall_limit must be >= 1");
    if (max_generations < 1) throw ContractError("max_generations must be >= 1");
    if (!(sigma_floor > 0)) throw ContractError("sigma_floor must be > 0");
    if (sigma_cap_fraction && !(*sigma_cap_fraction > 0)) {
      throw ContractError("sigma_cap_fraction must be > 0");
    }
    if (tau_global && !(*tau_global >= 0)) throw ContractError("tau_global must be >= 0");
    if (tau_local && !(*tau_local >= 0)) throw ContractError("tau_local must be >= 0");
  }
};

struct LearningRates {
  double global = 0.0;
  double local = 0.0;
};

/// Schwefel's settings for a genome of length l.
inline LearningRates default_learning_rates(std::size_t l) {
  const double dl = static_cast<double>(l);
  return {1.0 / std::sqrt(2.0 * dl), 1.0 / std::sqrt(2.0 * std::sqrt(dl))};
}

inline LearningRates learning_rates(const EsConfig& cfg, std::size_t l) {
  const auto d = default_learning_rates(l);
  return {cfg.tau_global.value_or(d.global), cfg.tau_local.value_or(d.local)};
}

struct Evaluation {
  double fitness = 0.0;
  bool feasible = false;
};

template <class F>
concept FitnessFunction = requires(const F& f, std::span<const double> genome) {
  { f(genome) } -> std::convertible_to<Evaluation>;
};

struct Individual {
  std::vector<double> genome;
  std::vector<double> sigmas;
  std::optional<double> fitness;
  bool feasible = false;

  bool operator==(const Individual&) const = default;
};

struct BestRecord {
  std::optional<Individual> individual;
  double fitness = -std::numeric_limits<double>::infinity();
  std::size_t generation_found = 0;
  std::size_t stall_counter = 0;

  bool operator==(const BestRecord&) const = default;
};

struct EsState {
  std::vector<Individual> population;
  BestRecord best;
  std::size_t generation = 0;
  std::size_t evaluations = 0;
  Rng rng;

  bool operator==(const EsState&) const = default;
};

/// Draws a uniform real in [lo, hi]; a zero-width interval returns lo.
inline double uniform_in(Rng& rng, double lo, double hi) {
  if (!(hi > lo)) return lo;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::min(lo + (hi - lo) * u(rng), hi);
}

inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

inline std::vector<double> clip_to_box(std::vector<double> genome, const Box& box) {
  if (genome.size() != box.size()) throw ContractError("genome and box dimensions differ");
  for (std::size_t i = 0; i < genome.size(); ++i) {
    genome[i] = std::min(std::max(genome[i], box.lower[i]), box.upper[i]);
  }
  return genome;
}

inline bool in_box(std::span<const double> genome, const Box& box) {
  if (genome.size() != box.size()) return false;
  for (std::size_t i = 0; i < genome.size(); ++i) {
    if (!(genome[i] >= box.lower[i] && genome[i] <= box.upper[i])) return false;
  }
  return true;
}

inline std::vector<Individual> init_population(const Box& box, const EsConfig& cfg, Rng& rng) {
  std::vector<Individual> pop(cfg.mu);
  for (auto& ind : pop) {
    ind.genome.resize(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) {
      ind.genome[i] = uniform_in(rng, box.lower[i], box.upper[i]);
    }
    ind.sigmas.assign(box.size(), cfg.sigma_init);
  }
  return pop;
}

/// Discrete on the genome, intermediate (weight alpha on parent1) on sigmas.
inline Individual recombine(const Individual& p1, const Individual& p2, double alpha, Rng& rng) {
  if (p1.genome.size() != p2.genome.size() || p1.sigmas.size() != p2.sigmas.size() ||
      p1.genome.size() != p1.sigmas.size()) {
    throw ContractError("parents differ in dimension");
  }
  Individual child;
  child.genome.resize(p1.genome.size());
  child.sigmas.resize(p1.sigmas.size());
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < child.genome.size(); ++i) {
    child.genome[i] = coin(rng) ? p1.genome[i] : p2.genome[i];
  }
  for (std::size_t i = 0; i < child.sigmas.size(); ++i) {
    child.sigmas[i] = alpha * p1.sigmas[i] + (1.0 - alpha) * p2.sigmas[i];
  }
  return child;
}

/// The normal deviates consumed by one mutation, drawn in this order:
/// the shared global draw, l strength draws, then l step draws.
struct MutationDraws {
  double global = 0.0;
  std::vector<double> sigma;
  std::vector<double> step;
};

inline MutationDraws draw_mutation(std::size_t l, Rng& rng) {
  MutationDraws d;
  d.global = standard_normal(rng);
  d.sigma.resize(l);
  d.step.resize(l);
  for (auto& s : d.sigma) s = standard_normal(rng);
  for (auto& s : d.step) s = standard_normal(rng);
  return d;
}

struct StepLimits {
  double floor = 1e-6;
  std::optional<double> cap_fraction;
};

inline StepLimits step_limits(const EsConfig& cfg) { return {cfg.sigma_floor, cfg.sigma_cap_fraction}; }

/// Deterministic half of mutation. Cap and floor are applied to sigma' before
/// it scales the step (the floor wins if they cross); the result is clipped to
/// the box.
inline Individual apply_mutation(Individual ind, const MutationDraws& draws, LearningRates rates,
                                 StepLimits limits, const Box& box) {
  const std::size_t l = ind.genome.size();
  if (ind.sigmas.size() != l || draws.sigma.size() != l || draws.step.size() != l) {
    throw ContractError("mutation dimension mismatch");
  }
  for (std::size_t i = 0; i < l; ++i) {
    double s = ind.sigmas[i] * std::exp(rates.global * draws.global + rates.local * draws.sigma[i]);
    if (limits.cap_fraction) s = std::min(s, *limits.cap_fraction * (box.upper[i] - box.lower[i]));
    ind.sigmas[i] = std::max(s, limits.floor);
    ind.genome[i] += ind.sigmas[i] * draws.step[i];
  }
  ind.genome = clip_to_box(std::move(ind.genome), box);
  ind.fitness.reset();
  ind.feasible = false;
  return ind;
}

inline Individual mutate(Individual ind, const EsConfig& cfg, const Box& box, Rng& rng) {
  for (double s : ind.sigmas) {
    if (!(s > 0)) throw ContractError("mutation strengths must be positive");
  }
  const std::size_t l = ind.genome.size();
  const auto draws = draw_mutation(l, rng);
  return apply_mutation(std::move(ind), draws, learning_rates(cfg, l), step_limits(cfg), box);
}

/// Comma selection: the mu fittest children, ties kept in generation order.
inline std::vector<Individual> select(std::span<const Individual> children, std::size_t mu) {
  for (const auto& c : children) {
    if (!c.fitness) throw ContractError("select called with an unevaluated child");
  }
  if (mu > children.size()) throw ContractError("mu exceeds the number of children");
  std::vector<std::size_t> order(children.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return *children[a].fitness > *children[b].fitness;
  });
  std::vector<Individual> out;
  out.reserve(mu);
  for (std::size_t k = 0; k < mu; ++k) out.push_back(children[order[k]]);
  return out;
}

inline EsState initial_state(const Box& box, const EsConfig& cfg) {
  cfg.validate();
  EsState s;
  s.rng.seed(cfg.seed);
  s.population = init_population(box, cfg, s.rng);
  return s;
}

/// Picks two distinct parent indices uniformly (the same index twice when mu = 1).
inline std::pair<std::size_t, std::size_t> pick_parents(std::size_t mu, Rng& rng) {
  if (mu == 1) return {0, 0};
  std::uniform_int_distribution<std::size_t> first(0, mu - 1);
  std::uniform_int_distribution<std::size_t> second(0, mu - 2);
  const std::size_t a = first(rng);
  std::size_t b = second(rng);
  if (b >= a) ++b;
  return {a, b};
}

/// One generation. All random draws happen before any evaluation, so the
/// trajectory depends only on the seed.
template <FitnessFunction F>
void step(EsState& state, const Box& box, const F& fitness, const EsConfig& cfg) {
  const auto rates = learning_rates(cfg, box.size());
  const auto limits = step_limits(cfg);
  std::vector<Individual> children;
  children.reserve(cfg.eta);
  for (std::size_t k = 0; k < cfg.eta; ++k) {
    const auto [a, b] = pick_parents(state.population.size(), state.rng);
    Individual child = recombine(state.population[a], state.population[b], cfg.alpha, state.rng);
    const auto draws = draw_mutation(child.genome.size(), state.rng);
    children.push_back(apply_mutation(std::move(child), draws, rates, limits, box));
  }

  for (auto& c : children) {
    const Evaluation e = fitness(std::span<const double>(c.genome));
    c.fitness = e.fitness;
    c.feasible = e.feasible;
  }
  state.evaluations += children.size();
  ++state.generation;

  bool improved = false;
  for (const auto& c : children) {
    if (c.feasible && *c.fitness > state.best.fitness) {
      state.best.individual = c;
      state.best.fitness = *c.fitness;
      state.best.generation_found = state.generation;
      improved = true;
    }
  }
  state.best.stall_counter = improved ? 0 : state.best.stall_counter + 1;
  state.population = select(children, cfg.mu);
}

enum class StopReason { Stalled, GenerationCap };

struct EsOutcome {
  BestRecord best;
  std::size_t generations = 0;
  std::size_t evaluations = 0;
  StopReason reason = StopReason::Stalled;
};

/// Called after every generation with the updated state.
template <class Obs>
concept Observer = std::invocable<Obs&, const EsState&>;

struct NoObserver {
  void operator()(const EsState&) const {}
};

template <FitnessFunction F, Observer Obs = NoObserver>
EsOutcome run(const Box& box, const F& fitness, const EsConfig& cfg, Obs&& observer = {}) {
  EsState state = initial_state(box, cfg);
  EsOutcome out;
  while (true) {
    step(state, box, fitness, cfg);
    observer(static_cast<const EsState&>(state));
    if (state.best.stall_counter >= cfg.stall_limit) {
      out.reason = StopReason::Stalled;
      break;
    }
    if (state.generation >= cfg.max_generations) {
      out.reason = StopReason::GenerationCap;
      break;
    }
  }
  out.best = state.best;
  out.generations = state.generation;
  out.evaluations = state.evaluations;
  return out;
}

}  // namespace millopt::es
