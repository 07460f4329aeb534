#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "millopt/millopt.hpp"
#include "test_support.hpp"

using namespace millopt;
using oracle::GridSpec;

namespace {

// Best profit rate over the full Cartesian grid by brute force.
double enumerate_best(const MillingPlan& plan, std::size_t resolution) {
  const auto coeffs = derive_coefficients(plan);
  const auto m = plan.size();
  std::vector<std::vector<double>> vs, fs;
  for (const auto& c : coeffs) {
    vs.push_back(oracle::grid_axis(c.speed_bounds, resolution));
    fs.push_back(oracle::grid_axis(c.feed_bounds, resolution));
  }
  const std::size_t per_op = resolution * resolution;
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= per_op;

  double best = -std::numeric_limits<double>::infinity();
  DecisionVector x;
  x.speeds.resize(m);
  x.feeds.resize(m);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t cell = rest % per_op;
      rest /= per_op;
      x.speeds[i] = vs[i][cell / resolution];
      x.feeds[i] = fs[i][cell % resolution];
    }
    if (is_feasible(plan, x, coeffs)) best = std::max(best, profit_rate(plan, x, coeffs));
  }
  return best;
}

MillingPlan two_operation_plan() {
  auto p = builtin_case().plan;
  p.operations = {p.operations[0], p.operations[1]};
  return p;
}

}  // namespace

TEST(Grid, AxisEndpointsExact) {
  const Interval box{0.05, 0.4};
  const auto axis = oracle::grid_axis(box, 7);
  ASSERT_EQ(axis.size(), 7u);
  EXPECT_EQ(axis.front(), 0.05);
  EXPECT_EQ(axis.back(), 0.4);
  for (std::size_t k = 1; k < axis.size(); ++k) EXPECT_GT(axis[k], axis[k - 1]);
}

TEST(Grid, ResolutionBelowTwoRejected) {
  const auto plan = builtin_case().plan;
  const auto coeffs = derive_coefficients(plan);
  EXPECT_THROW(oracle::dinkelbach_solve(plan, coeffs, {.resolution = 1}), ContractError);
  EXPECT_THROW(oracle::per_op_grid_min(0, 0.0, plan, coeffs, {.resolution = 0}), ContractError);
}

TEST(Grid, DegenerateBoxHasSinglePoint) {
  auto plan = fixtures::toy_feasible_plan();
  plan.operations[0].speed_bounds = {80.0, 80.0};
  plan.operations[0].feed_bounds = {0.1, 0.1};
  const auto coeffs = derive_coefficients(plan);
  const auto p = oracle::per_op_grid_min(0, 1.0, plan, coeffs, {.resolution = 4});
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->v, 80.0);
  EXPECT_EQ(p->f, 0.1);
  const auto r = oracle::dinkelbach_solve(plan, coeffs, {.resolution = 2});
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.profit_rate, profit_rate(plan, {{80.0}, {0.1}}, coeffs), 1e-12);
}

TEST(PerOperation, LambdaZeroMinimisesCostAlone) {
  const auto plan = builtin_case().plan;
  const auto coeffs = derive_coefficients(plan);
  const double rate = plan.economics.time_rate();
  const std::size_t res = 30;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto p = oracle::per_op_grid_min(i, 0.0, plan, coeffs, {.resolution = res});
    ASSERT_TRUE(p.has_value());
    double best = std::numeric_limits<double>::infinity();
    for (double v : oracle::grid_axis(coeffs[i].speed_bounds, res)) {
      for (double f : oracle::grid_axis(coeffs[i].feed_bounds, res)) {
        if (operation_margins(coeffs[i], v, f).satisfied()) {
          best = std::min(best, operation_cost(rate, coeffs[i], v, f));
        }
      }
    }
    EXPECT_NEAR(p->value, best, 1e-12 * best);
  }
}

TEST(PerOperation, ExhaustiveAgainstEveryFeasiblePoint) {
  const auto plan = builtin_case().plan;
  const auto coeffs = derive_coefficients(plan);
  const double rate = plan.economics.time_rate();
  const std::size_t res = 25;
  for (double lambda : {-3.0, 0.5, 1.4, 10.0}) {
    for (std::size_t i = 0; i < plan.size(); ++i) {
      const auto p = oracle::per_op_grid_min(i, lambda, plan, coeffs, {.resolution = res});
      ASSERT_TRUE(p.has_value());
      EXPECT_TRUE(operation_margins(coeffs[i], p->v, p->f).satisfied());
      for (double v : oracle::grid_axis(coeffs[i].speed_bounds, res)) {
        for (double f : oracle::grid_axis(coeffs[i].feed_bounds, res)) {
          if (!operation_margins(coeffs[i], v, f).satisfied()) continue;
          const double val = operation_cost(rate, coeffs[i], v, f) + lambda * operation_time(coeffs[i], v, f);
          EXPECT_LE(p->value, val + 1e-12 * std::abs(val));
        }
      }
    }
  }
}

TEST(PerOperation, NoFeasiblePoint) {
  const auto plan = fixtures::infeasible_plan();
  const auto coeffs = derive_coefficients(plan);
  EXPECT_FALSE(oracle::per_op_grid_min(0, 1.0, plan, coeffs, {.resolution = 20}).has_value());
}

TEST(PerOperation, OperationIndexOutOfRange) {
  const auto plan = builtin_case().plan;
  const auto coeffs = derive_coefficients(plan);
  EXPECT_THROW(oracle::per_op_grid_min(9, 0.0, plan, coeffs, {}), ContractError);
}

TEST(Dinkelbach, ThreeByThreeMatchesEnumeration) {
  const auto plan = fixtures::single_face_operation();
  const auto coeffs = derive_coefficients(plan);
  const auto r = oracle::dinkelbach_solve(plan, coeffs, {.resolution = 3});
  const double best = enumerate_best(plan, 3);
  ASSERT_TRUE(std::isfinite(best));
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.profit_rate, best, 1e-12);
}

TEST(Dinkelbach, TwoOperationsMatchJointEnumeration) {
  const auto plan = two_operation_plan();
  const auto coeffs = derive_coefficients(plan);
  const auto r = oracle::dinkelbach_solve(plan, coeffs, {.resolution = 10});
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.profit_rate, enumerate_best(plan, 10), 1e-9);
}

TEST(Dinkelbach, RandomPlansMatchEnumeration) {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto plan = fixtures::random_plan(rng, 2);
    const auto coeffs = derive_coefficients(plan);
    const auto r = oracle::dinkelbach_solve(plan, coeffs, {.resolution = 6});
    const double best = enumerate_best(plan, 6);
    EXPECT_EQ(r.feasible, std::isfinite(best));
    if (!r.feasible) continue;
    ++checked;
    EXPECT_NEAR(r.profit_rate, best, 1e-9 * std::max(1.0, std::abs(best)));
  }
  EXPECT_GT(checked, 10);
}

TEST(Dinkelbach, LambdaTraceNonDecreasing) {
  const auto plan = builtin_case().plan;
  const auto coeffs = derive_coefficients(plan);
  const auto r = oracle::dinkelbach_solve(plan, coeffs, {.resolution = 200});
  ASSERT_TRUE(r.feasible);
  ASSERT_GE(r.lambda_trace.size(), 2u);
  for (std::size_t k = 2; k < r.lambda_trace.size(); ++k) {
    EXPECT_GE(r.lambda_trace[k], r.lambda_trace[k - 1] - 1e-12);
  }
  EXPECT_EQ(r.lambda_trace.back(), r.profit_rate);
  EXPECT_EQ(r.iterations + 1, r.lambda_trace.size());
}

TEST(Dinkelbach, ResultFeasibleAndConsistent) {
  const auto plan = builtin_case().plan;
  const auto coeffs = derive_coefficients(plan);
  const auto r = oracle::dinkelbach_solve(plan, coeffs, {.resolution = 300});
  ASSERT_TRUE(r.feasible);
  EXPECT_TRUE(is_feasible(plan, r.best, coeffs));
  EXPECT_NEAR(r.unit_cost, unit_cost(plan, r.best, coeffs), 1e-12);
  EXPECT_NEAR(r.unit_time, unit_time(plan, r.best, coeffs), 1e-12);
  EXPECT_NEAR(r.profit_rate, (plan.economics.sale_price - r.unit_cost) / r.unit_time, 1e-12);
}

TEST(Dinkelbach, RefinementNeverWorse) {
  // Resolution 2r-1 contains every point of resolution r.
  const auto plan = builtin_case().plan;
  const auto coeffs = derive_coefficients(plan);
  double last = -std::numeric_limits<double>::infinity();
  for (std::size_t r : {5u, 9u, 17u, 33u, 65u, 129u}) {
    const auto res = oracle::dinkelbach_solve(plan, coeffs, {.resolution = r});
    ASSERT_TRUE(res.feasible);
    EXPECT_GE(res.profit_rate, last - 1e-12);
    last = res.profit_rate;
  }
}

TEST(Dinkelbach, InfeasiblePlan) {
  const auto plan = fixtures::infeasible_plan();
  const auto coeffs = derive_coefficients(plan);
  const auto r = oracle::dinkelbach_solve(plan, coeffs, {.resolution = 50});
  EXPECT_FALSE(r.feasible);
}

TEST(Dinkelbach, IterationCapRaises) {
  const auto plan = builtin_case().plan;
  const auto coeffs = derive_coefficients(plan);
  try {
    oracle::dinkelbach_solve(plan, coeffs, {.resolution = 100, .max_dinkelbach_iterations = 1});
    FAIL() << "expected OracleError";
  } catch (const oracle::OracleError& e) {
    EXPECT_EQ(e.lambda_trace.size(), 2u);
  }
}
