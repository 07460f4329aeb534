#pragma once

/// @file oracle.hpp
/// @brief Grid-restricted global optimum of the profit rate, independent of
/// the evolution strategy.
///
/// Unit cost and unit time are sums of per-operation terms and every
/// constraint involves a single operation, so for a fixed ratio estimate
/// lambda the parametric problem min C_u + lambda T_u splits into m
/// independent 2-D grid scans. Dinkelbach's iteration on lambda then reaches
/// the exact maximum of (S_p - C_u) / T_u over the joint grid.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "millopt/errors.hpp"
#include "millopt/model.hpp"

namespace millopt::oracle {

struct GridSpec {
  std::size_t resolution = 500;  // points per axis, endpoints included
  double dinkelbach_tolerance = 1e-12;
  std::size_t max_dinkelbach_iterations = 100;

  void validate() const {
    if (resolution < 2) throw ContractError("grid resolution must be >= 2");
    if (!(dinkelbach_tolerance > 0)) throw ContractError("dinkelbach tolerance must be > 0");
    if (max_dinkelbach_iterations < 1) throw ContractError("max dinkelbach iterations must be >= 1");
  }
};

class OracleError : public std::runtime_error {
 public:
  OracleError(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), lambda_trace(std::move(trace)) {}
  std::vector<double> lambda_trace;
};

/// k-th of `resolution` uniformly spaced points on [lo, hi]; both ends exact.
inline double grid_point(const Interval& box, std::size_t k, std::size_t resolution) {
  if (k + 1 == resolution) return box.max;
  const double t = static_cast<double>(k) / static_cast<double>(resolution - 1);
  return std::min(box.min + (box.max - box.min) * t, box.max);
}

inline std::vector<double> grid_axis(const Interval& box, std::size_t resolution) {
  std::vector<double> axis(resolution);
  for (std::size_t k = 0; k < resolution; ++k) axis[k] = grid_point(box, k, resolution);
  return axis;
}

struct GridPoint {
  double v = 0.0;
  double f = 0.0;
  double value = 0.0;  // cost_i + lambda * time_i
};

/// Grid of one operation with feasibility and the lambda-independent factors
/// precomputed. Feasibility comes from the model's own margin evaluation.
class OperationGrid {
 public:
  OperationGrid(const DerivedCoefficients& c, double time_rate, std::size_t resolution)
      : coeffs_(c), rate_(time_rate), speeds_(grid_axis(c.speed_bounds, resolution)),
        feeds_(grid_axis(c.feed_bounds, resolution)), feasible_(resolution * resolution) {
    speed_pow_.reserve(resolution);
    feed_pow_.reserve(resolution);
    for (double v : speeds_) speed_pow_.push_back(std::pow(v, c.speed_exponent));
    for (double f : feeds_) feed_pow_.push_back(std::pow(f, c.feed_exponent));
    for (std::size_t j = 0; j < resolution; ++j) {
      for (std::size_t k = 0; k < resolution; ++k) {
        const bool ok = operation_margins(c, speeds_[j], feeds_[k]).satisfied();
        feasible_[j * resolution + k] = ok;
        any_feasible_ = any_feasible_ || ok;
      }
    }
  }

  [[nodiscard]] bool any_feasible() const { return any_feasible_; }

  [[nodiscard]] std::optional<GridPoint> minimize(double lambda) const {
    const std::size_t r = speeds_.size();
    const double tool_scale = coeffs_.tool_price * coeffs_.k3;
    double best = std::numeric_limits<double>::infinity();
    std::size_t bj = r, bk = r;
    for (std::size_t j = 0; j < r; ++j) {
      const double v = speeds_[j];
      const double vt = tool_scale * speed_pow_[j];
      for (std::size_t k = 0; k < r; ++k) {
        if (!feasible_[j * r + k]) continue;
        const double time = coeffs_.k1 / (v * feeds_[k]) + coeffs_.change_time;
        const double value = rate_ * time + vt * feed_pow_[k] + lambda * time;
        if (value < best) {
          best = value;
          bj = j;
          bk = k;
        }
      }
    }
    if (bj == r) return std::nullopt;
    const double v = speeds_[bj];
    const double f = feeds_[bk];
    return GridPoint{v, f,
                     operation_cost(rate_, coeffs_, v, f) + lambda * operation_time(coeffs_, v, f)};
  }

 private:
  DerivedCoefficients coeffs_;
  double rate_;
  std::vector<double> speeds_;
  std::vector<double> feeds_;
  std::vector<double> speed_pow_;
  std::vector<double> feed_pow_;
  std::vector<bool> feasible_;
  bool any_feasible_ = false;
};

/// Feasible grid point of operation `op_index` minimising
/// cost_i + lambda * time_i; nullopt when no grid point is feasible.
inline std::optional<GridPoint> per_op_grid_min(std::size_t op_index, double lambda,
                                                const MillingPlan& plan,
                                                const std::vector<DerivedCoefficients>& coeffs,
                                                const GridSpec& grid) {
  grid.validate();
  if (op_index >= coeffs.size()) throw ContractError("operation index out of range");
  OperationGrid g(coeffs[op_index], plan.economics.time_rate(), grid.resolution);
  return g.minimize(lambda);
}

struct OracleResult {
  bool feasible = false;
  DecisionVector best;
  double unit_cost = 0.0;
  double unit_time = 0.0;
  double profit_rate = 0.0;
  std::size_t iterations = 0;
  std::vector<double> lambda_trace;
};

/// Dinkelbach iteration lambda_{k+1} = (S_p - C_u(x_k)) / T_u(x_k), where x_k
/// minimises C_u + lambda_k T_u over the grid. Starts from the all-midpoints
/// profit rate when that point is feasible, otherwise from zero.
inline OracleResult dinkelbach_solve(const MillingPlan& plan,
                                     const std::vector<DerivedCoefficients>& coeffs,
                                     const GridSpec& grid) {
  grid.validate();
  const auto m = plan.size();
  const double rate = plan.economics.time_rate();
  OracleResult out;

  std::vector<OperationGrid> grids;
  grids.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    grids.emplace_back(coeffs[i], rate, grid.resolution);
    if (!grids.back().any_feasible()) return out;
  }

  DecisionVector mid;
  for (const auto& op : plan.operations) {
    mid.speeds.push_back(op.speed_bounds.midpoint());
    mid.feeds.push_back(op.feed_bounds.midpoint());
  }
  double lambda = is_feasible(plan, mid, coeffs) ? profit_rate(plan, mid, coeffs) : 0.0;
  out.lambda_trace.push_back(lambda);

  DecisionVector x;
  x.speeds.resize(m);
  x.feeds.resize(m);
  for (std::size_t it = 1; it <= grid.max_dinkelbach_iterations; ++it) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto p = grids[i].minimize(lambda);
      x.speeds[i] = p->v;
      x.feeds[i] = p->f;
    }
    const double cost = unit_cost(plan, x, coeffs);
    const double time = unit_time(plan, x, coeffs);
    const double next = profit_rate(plan.economics.sale_price, cost, time);
    out.lambda_trace.push_back(next);
    if (std::abs(next - lambda) < grid.dinkelbach_tolerance) {
      out.feasible = true;
      out.best = x;
      out.unit_cost = cost;
      out.unit_time = time;
      out.profit_rate = next;
      out.iterations = it;
      return out;
    }
    lambda = next;
  }
  throw OracleError("Dinkelbach iteration did not converge within " +
                        std::to_string(grid.max_dinkelbach_iterations) + " iterations",
                    out.lambda_trace);
}

}  // namespace millopt::oracle
