#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "millopt/es.hpp"
#include "millopt/model.hpp"

namespace millopt {

/// Outcome of one optimizer run on a milling plan.
struct RunResult {
  bool feasible = false;
  DecisionVector best;
  std::vector<double> sigmas_final;
  double unit_cost = 0.0;
  double unit_time = 0.0;
  double profit_rate = 0.0;
  std::size_t generations = 0;
  std::size_t evaluations = 0;
  std::size_t generation_found = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

/// Search box in genome order V_1..V_m, f_1..f_m.
inline es::Box plan_box(const MillingPlan& plan) {
  es::Box box;
  const auto m = plan.size();
  box.lower.resize(2 * m);
  box.upper.resize(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& op = plan.operations[i];
    box.lower[i] = op.speed_bounds.min;
    box.upper[i] = op.speed_bounds.max;
    box.lower[m + i] = op.feed_bounds.min;
    box.upper[m + i] = op.feed_bounds.max;
  }
  return box;
}

/// Death-penalty fitness over a genome. Holds references; the plan and
/// coefficients must outlive it.
class PlanFitness {
 public:
  PlanFitness(const MillingPlan& plan, const std::vector<DerivedCoefficients>& coeffs)
      : plan_(plan), coeffs_(coeffs) {}

  es::Evaluation operator()(std::span<const double> genome) const {
    const auto x = DecisionVector::from_genome(genome);
    if (!is_feasible(plan_, x, coeffs_)) return {0.0, false};
    return {profit_rate(plan_, x, coeffs_), true};
  }

 private:
  const MillingPlan& plan_;
  const std::vector<DerivedCoefficients>& coeffs_;
};

template <es::Observer Obs = es::NoObserver>
RunResult optimize(const MillingPlan& plan, const es::EsConfig& cfg, Obs&& observer = {}) {
  validate_plan(plan);
  const auto coeffs = derive_coefficients(plan);
  const PlanFitness fit(plan, coeffs);
  const auto outcome = es::run(plan_box(plan), fit, cfg, std::forward<Obs>(observer));

  RunResult r;
  r.seed = cfg.seed;
  r.generations = outcome.generations;
  r.evaluations = outcome.evaluations;
  r.warnings = plan_warnings(plan);
  if (outcome.best.individual) {
    const auto& best = *outcome.best.individual;
    r.feasible = true;
    r.best = DecisionVector::from_genome(best.genome);
    r.sigmas_final = best.sigmas;
    r.unit_cost = unit_cost(plan, r.best, coeffs);
    r.unit_time = unit_time(plan, r.best, coeffs);
    r.profit_rate = *best.fitness;
    r.generation_found = outcome.best.generation_found;
  }
  return r;
}

}  // namespace millopt
