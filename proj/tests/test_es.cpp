#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "millopt/millopt.hpp"
#include "test_support.hpp"

using namespace millopt;
using es::Box;
using es::EsConfig;
using es::Individual;

namespace {

Individual make(std::vector<double> genome, std::vector<double> sigmas,
                std::optional<double> fitness = std::nullopt) {
  Individual ind;
  ind.genome = std::move(genome);
  ind.sigmas = std::move(sigmas);
  ind.fitness = fitness;
  ind.feasible = fitness.has_value();
  return ind;
}

Box wide_box(std::size_t l) { return {std::vector<double>(l, -1e9), std::vector<double>(l, 1e9)}; }

}  // namespace

TEST(InitPopulation, SizeAndInitialStrengths) {
  const auto plan = builtin_case().plan;
  EsConfig cfg;
  es::Rng rng(1);
  const auto box = plan_box(plan);
  const auto pop = es::init_population(box, cfg, rng);
  ASSERT_EQ(pop.size(), 15u);
  for (const auto& ind : pop) {
    EXPECT_EQ(ind.sigmas, std::vector<double>(10, 3.0));
    EXPECT_TRUE(es::in_box(ind.genome, box));
    EXPECT_FALSE(ind.fitness.has_value());
  }
}

TEST(InitPopulation, DegenerateBoxPinsComponent) {
  const Box box{{1.0, 5.0}, {2.0, 5.0}};
  EsConfig cfg;
  es::Rng rng(3);
  for (const auto& ind : es::init_population(box, cfg, rng)) EXPECT_EQ(ind.genome[1], 5.0);
}

TEST(InitPopulation, SameSeedSamePopulation) {
  const auto box = plan_box(builtin_case().plan);
  EsConfig cfg;
  es::Rng a(99), b(99);
  EXPECT_EQ(es::init_population(box, cfg, a), es::init_population(box, cfg, b));
}

TEST(Recombine, IdenticalParents) {
  es::Rng rng(4);
  const auto p = make({1.0, 2.0, 3.0}, {0.5, 0.6, 0.7});
  const auto c = es::recombine(p, p, 0.3, rng);
  EXPECT_EQ(c.genome, p.genome);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(c.sigmas[i], p.sigmas[i]);
}

TEST(Recombine, IntermediateMidpointOfStrengths) {
  es::Rng rng(5);
  const auto c = es::recombine(make({0, 0}, {2, 4}), make({1, 1}, {4, 8}), 0.5, rng);
  EXPECT_EQ(c.sigmas, (std::vector<double>{3.0, 6.0}));
}

TEST(Recombine, DiscreteGenesComeFromAParent) {
  es::Rng rng(6);
  const auto p1 = make({1, 2, 3, 4, 5, 6}, {1, 1, 1, 1, 1, 1});
  const auto p2 = make({-1, -2, -3, -4, -5, -6}, {1, 1, 1, 1, 1, 1});
  int from_first = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = es::recombine(p1, p2, 0.5, rng);
    for (std::size_t i = 0; i < 6; ++i) {
      EXPECT_TRUE(c.genome[i] == p1.genome[i] || c.genome[i] == p2.genome[i]);
      from_first += c.genome[i] == p1.genome[i];
    }
  }
  EXPECT_NEAR(from_first / 1200.0, 0.5, 0.06);
}

TEST(Recombine, DimensionMismatch) {
  es::Rng rng(7);
  EXPECT_THROW(es::recombine(make({1}, {1}), make({1, 2}, {1, 1}), 0.5, rng), ContractError);
}

TEST(Mutation, DefaultLearningRatesForTenComponents) {
  const auto r = es::default_learning_rates(10);
  EXPECT_NEAR(r.global, 0.22360679774997896, 1e-15);
  EXPECT_NEAR(r.local, 0.3976353643835253, 1e-15);
}

TEST(Mutation, ZeroDrawsLeaveIndividualUnchanged) {
  const auto box = plan_box(builtin_case().plan);
  const auto ind = make({90, 40, 40, 30, 31, 0.07, 0.3, 0.3, 0.5, 0.38}, std::vector<double>(10, 0.2));
  es::MutationDraws zero{0.0, std::vector<double>(10, 0.0), std::vector<double>(10, 0.0)};
  const auto out = es::apply_mutation(ind, zero, es::default_learning_rates(10), {1e-6, 1.0}, box);
  EXPECT_EQ(out.genome, ind.genome);
  EXPECT_EQ(out.sigmas, ind.sigmas);
}

TEST(Mutation, LogNormalStrengthUpdate) {
  // sigma' = 3 * exp(tau_global + tau_local) with unit draws, l = 10.
  const auto box = wide_box(10);
  es::MutationDraws d{1.0, std::vector<double>(10, 1.0), std::vector<double>(10, 0.0)};
  const auto out = es::apply_mutation(make(std::vector<double>(10, 0.0), std::vector<double>(10, 3.0)),
                                      d, es::default_learning_rates(10), {1e-6, std::nullopt}, box);
  for (double s : out.sigmas) EXPECT_NEAR(s, 5.58371569978476, 1e-12);
}

TEST(Mutation, StepUsesUpdatedStrength) {
  const auto box = wide_box(2);
  es::MutationDraws d{0.0, {0.0, 0.0}, {1.0, -2.0}};
  const auto out = es::apply_mutation(make({1.0, 1.0}, {0.5, 0.25}), d, {0.1, 0.2}, {1e-6, std::nullopt}, box);
  EXPECT_DOUBLE_EQ(out.genome[0], 1.5);
  EXPECT_DOUBLE_EQ(out.genome[1], 0.5);
}

TEST(Mutation, FloorAndCap) {
  const Box box{{0.0, 0.0}, {10.0, 10.0}};
  es::MutationDraws d{0.0, {-50.0, 50.0}, {0.0, 0.0}};
  const auto out = es::apply_mutation(make({5, 5}, {1, 1}), d, {0.0, 1.0}, {1e-3, 0.5}, box);
  EXPECT_EQ(out.sigmas[0], 1e-3);
  EXPECT_EQ(out.sigmas[1], 5.0);
}

TEST(Mutation, ResultIsClipped) {
  const Box box{{0.0}, {1.0}};
  es::MutationDraws d{0.0, {0.0}, {100.0}};
  const auto out = es::apply_mutation(make({0.5}, {1.0}), d, {0.0, 0.0}, {1e-6, std::nullopt}, box);
  EXPECT_EQ(out.genome[0], 1.0);
}

TEST(Mutation, NonPositiveStrengthRejected) {
  EsConfig cfg;
  es::Rng rng(1);
  EXPECT_THROW(es::mutate(make({0.0}, {0.0}), cfg, wide_box(1), rng), ContractError);
}

TEST(ClipToBox, Cases) {
  const auto box = plan_box(builtin_case().plan);
  std::vector<double> g{130, 40, 40, 30, 31, 0.07, 0.3, 0.3, 0.5, 0.38};
  const auto clipped = es::clip_to_box(g, box);
  EXPECT_EQ(clipped[0], 120.0);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_EQ(clipped[i], g[i]);
  g[0] = 59.0;
  g[5] = 0.01;
  const auto low = es::clip_to_box(g, box);
  EXPECT_EQ(low[0], 60.0);
  EXPECT_EQ(low[5], 0.05);
}

TEST(Select, KeepsBest) {
  std::vector<Individual> kids{make({1}, {1}, 3.0), make({2}, {1}, 1.0), make({3}, {1}, 2.0)};
  const auto kept = es::select(kids, 2);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(*kept[0].fitness, 3.0);
  EXPECT_EQ(*kept[1].fitness, 2.0);
}

TEST(Select, TiesKeepGenerationOrder) {
  std::vector<Individual> kids{make({1}, {1}, 0.0), make({2}, {1}, 0.0), make({3}, {1}, 0.0)};
  const auto kept = es::select(kids, 2);
  EXPECT_EQ(kept[0].genome[0], 1.0);
  EXPECT_EQ(kept[1].genome[0], 2.0);
}

TEST(Select, UnevaluatedChildIsContractError) {
  std::vector<Individual> kids{make({1}, {1}, 3.0), make({2}, {1})};
  EXPECT_THROW(es::select(kids, 1), ContractError);
}

TEST(Select, SurvivorsDominateDiscarded) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> fd(-5, 5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Individual> kids;
    for (int k = 0; k < 30; ++k) kids.push_back(make({double(k)}, {1}, fd(rng) * 0.5));
    const auto kept = es::select(kids, 7);
    double min_kept = 1e9;
    for (const auto& k : kept) min_kept = std::min(min_kept, *k.fitness);
    int at_least = 0;
    for (const auto& k : kids) at_least += *k.fitness >= min_kept;
    EXPECT_GE(at_least, 7);
    for (const auto& k : kids) {
      bool survived = false;
      for (const auto& s : kept) survived = survived || s.genome == k.genome;
      if (!survived) {
        EXPECT_LE(*k.fitness, min_kept);
      }
    }
  }
}

TEST(Step, RecordMonotoneAndEvaluationCount) {
  const auto plan = builtin_case().plan;
  const auto coeffs = derive_coefficients(plan);
  const PlanFitness fit(plan, coeffs);
  const auto box = plan_box(plan);
  EsConfig cfg;
  auto state = es::initial_state(box, cfg);
  double last = state.best.fitness;
  for (int g = 1; g <= 50; ++g) {
    es::step(state, box, fit, cfg);
    EXPECT_GE(state.best.fitness, last);
    last = state.best.fitness;
    EXPECT_EQ(state.evaluations, g * cfg.eta);
    EXPECT_EQ(state.population.size(), cfg.mu);
  }
}

TEST(Step, SeedDeterminesTrajectory) {
  const auto plan = builtin_case().plan;
  const auto coeffs = derive_coefficients(plan);
  const PlanFitness fit(plan, coeffs);
  const auto box = plan_box(plan);
  EsConfig cfg;
  cfg.seed = 1234;
  auto a = es::initial_state(box, cfg);
  auto b = es::initial_state(box, cfg);
  for (int g = 0; g < 30; ++g) {
    es::step(a, box, fit, cfg);
    es::step(b, box, fit, cfg);
    ASSERT_EQ(a, b);
  }
}

TEST(Step, SingleParentPopulation) {
  const auto plan = fixtures::toy_feasible_plan();
  const auto coeffs = derive_coefficients(plan);
  EsConfig cfg;
  cfg.mu = 1;
  cfg.eta = 4;
  cfg.stall_limit = 20;
  const auto r = optimize(plan, cfg);
  EXPECT_TRUE(r.feasible);
}

TEST(Run, InfeasibleBoxStopsAfterOneGeneration) {
  EsConfig cfg;
  cfg.stall_limit = 1;
  const auto r = optimize(fixtures::infeasible_plan(), cfg);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.generations, 1u);
  EXPECT_EQ(r.evaluations, cfg.eta);
}

TEST(Run, GenerationCapStops) {
  EsConfig cfg;
  cfg.stall_limit = 1000000;
  cfg.max_generations = 25;
  const auto r = optimize(builtin_case().plan, cfg);
  EXPECT_EQ(r.generations, 25u);
}

TEST(Run, InvariantsOverFullRun) {
  const auto plan = builtin_case().plan;
  const auto box = plan_box(plan);
  EsConfig cfg;
  cfg.seed = 77;
  double last = -std::numeric_limits<double>::infinity();
  double best_population_fitness = -std::numeric_limits<double>::infinity();
  std::size_t generations = 0;
  const auto r = optimize(plan, cfg, [&](const es::EsState& s) {
    ++generations;
    EXPECT_GE(s.best.fitness, last);
    last = s.best.fitness;
    for (const auto& ind : s.population) {
      EXPECT_TRUE(es::in_box(ind.genome, box));
      for (double sg : ind.sigmas) EXPECT_GE(sg, cfg.sigma_floor);
      if (ind.feasible) best_population_fitness = std::max(best_population_fitness, *ind.fitness);
    }
  });
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.generations, generations);
  EXPECT_EQ(r.evaluations, r.generations * cfg.eta);
  EXPECT_GE(r.profit_rate, best_population_fitness);
  EXPECT_GE(r.generations, cfg.stall_limit);
  EXPECT_TRUE(is_feasible(plan, r.best, derive_coefficients(plan)));
}

TEST(Run, Deterministic) {
  EsConfig cfg;
  cfg.seed = 2024;
  const auto plan = builtin_case().plan;
  const auto a = optimize(plan, cfg);
  const auto b = optimize(plan, cfg);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.sigmas_final, b.sigmas_final);
  EXPECT_EQ(a.generations, b.generations);
  EXPECT_EQ(a.profit_rate, b.profit_rate);
}

TEST(Run, SingleOperationBeatsCoarseGrid) {
  const auto plan = fixtures::single_face_operation();
  const auto coeffs = derive_coefficients(plan);
  const auto grid = oracle::dinkelbach_solve(plan, coeffs, {.resolution = 25});
  ASSERT_TRUE(grid.feasible);
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    EsConfig cfg;
    cfg.seed = seed;
    cfg.stall_limit = 300;
    const auto r = optimize(plan, cfg);
    wins += r.feasible && r.profit_rate >= grid.profit_rate;
  }
  EXPECT_GE(wins, 19);
}

TEST(Config, Validation) {
  EsConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.eta = cfg.mu;
  EXPECT_THROW(cfg.validate(), ContractError);
  cfg = {};
  cfg.alpha = 1.0;
  EXPECT_THROW(cfg.validate(), ContractError);
  cfg = {};
  cfg.sigma_floor = 0.0;
  EXPECT_THROW(cfg.validate(), ContractError);
  cfg = {};
  cfg.sigma_cap_fraction = -1.0;
  EXPECT_THROW(cfg.validate(), ContractError);
}
