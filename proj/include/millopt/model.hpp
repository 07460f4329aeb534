#pragma once

/// @file model.hpp
/// @brief Multi-tool milling economics: unit cost, unit time, profit rate and
/// the per-operation feasibility constraints (power, surface finish, cutting
/// force, speed and feed boxes).
///
/// Units are fixed throughout: cutting speed V in m/min, feed f in mm/tooth,
/// lengths in mm, power in kW, time in min, money in $. Angles are stored in
/// degrees.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "millopt/errors.hpp"

namespace millopt {

enum class ToolKind { FaceMill, EndMill };
enum class ToolQuality { HSS, Carbide };
enum class OperationKind { Face, Corner, Pocket, Slot };

struct Interval {
  double min = 0.0;
  double max = 0.0;

  [[nodiscard]] bool contains(double x) const { return x >= min && x <= max; }
  [[nodiscard]] double midpoint() const { return 0.5 * (min + max); }
  bool operator==(const Interval&) const = default;
};

struct EconomicConstants {
  double sale_price = 0.0;     // S_p
  double material_cost = 0.0;  // c_mat
  double labor_rate = 0.0;     // c_l, $/min
  double overhead_rate = 0.0;  // c_o, $/min
  double setup_time = 0.0;     // t_s, min

  /// Labour plus overhead, the rate at which machine time is charged.
  [[nodiscard]] double time_rate() const { return labor_rate + overhead_rate; }
  bool operator==(const EconomicConstants&) const = default;
};

struct ToolSpec {
  int id = 0;
  ToolKind kind = ToolKind::EndMill;
  ToolQuality quality = ToolQuality::HSS;
  double diameter = 0.0;         // d, mm
  int teeth = 0;                 // z
  double price = 0.0;            // c_t, $
  double lead_angle = 0.0;       // la, degrees
  double clearance_angle = 0.0;  // ca, degrees
  double taylor_constant = 0.0;  // C
  double life_exponent = 0.0;    // n
  std::optional<double> permitted_force;  // F_c(per), N
  double change_time = 0.0;      // t_tc, min
  bool operator==(const ToolSpec&) const = default;
};

struct OperationSpec {
  int number = 0;
  OperationKind kind = OperationKind::Face;
  int tool = 0;                  // ToolSpec::id
  double axial_depth = 0.0;      // a, mm
  double radial_depth = 0.0;     // a_rad, mm
  bool radial_depth_assumed = false;
  double travel = 0.0;           // K, mm
  std::optional<double> surface_finish;  // R_a(at), um
  Interval speed_bounds;         // m/min
  Interval feed_bounds;          // mm/tooth
  std::optional<double> k3_override;
  bool operator==(const OperationSpec&) const = default;
};

struct MachineSpec {
  double motor_power = 0.0;          // P_m, kW
  double efficiency = 0.0;           // e
  double power_constant = 0.0;       // K_p
  double wear_factor = 0.0;          // W
  double chip_area_exponent = 0.0;   // w
  double slenderness_exponent = 0.0; // g
  bool operator==(const MachineSpec&) const = default;
};

struct MillingPlan {
  EconomicConstants economics;
  MachineSpec machine;
  std::vector<ToolSpec> tools;
  std::vector<OperationSpec> operations;

  [[nodiscard]] std::size_t size() const { return operations.size(); }
  [[nodiscard]] const ToolSpec* find_tool(int id) const {
    for (const auto& t : tools) {
      if (t.id == id) return &t;
    }
    return nullptr;
  }
  bool operator==(const MillingPlan&) const = default;
};

/// Speed box for an operation kind when the plan does not override it.
inline Interval default_speed_bounds(OperationKind kind) {
  switch (kind) {
    case OperationKind::Face: return {60.0, 120.0};
    case OperationKind::Corner: return {40.0, 70.0};
    case OperationKind::Pocket: return {40.0, 70.0};
    case OperationKind::Slot: return {30.0, 50.0};
  }
  return {};
}

inline Interval default_feed_bounds(OperationKind kind) {
  return kind == OperationKind::Face ? Interval{0.05, 0.4} : Interval{0.05, 0.5};
}

/// Per-operation constants folded out of the plan. Besides the named model
/// coefficients it carries the tool and box data every evaluation needs, so
/// the hot path never searches the tool list.
struct DerivedCoefficients {
  double k1 = 0.0;
  double k3 = 0.0;
  double c5 = 0.0;
  std::optional<double> c6;  // face mills with a finish requirement
  std::optional<double> c7;  // end mills with a finish requirement
  std::optional<double> c8;  // 1 / F_c(per)

  double speed_exponent = 0.0;  // 1/n - 1
  double feed_exponent = 0.0;   // (w+g)/n - 1
  double tool_price = 0.0;
  double change_time = 0.0;
  double force_scale = 0.0;     // F_c = force_scale * f^0.8
  Interval speed_bounds;
  Interval feed_bounds;
};

struct DecisionVector {
  std::vector<double> speeds;
  std::vector<double> feeds;

  [[nodiscard]] std::size_t size() const { return speeds.size(); }

  /// Genome layout used by the optimizer: V_1..V_m followed by f_1..f_m.
  [[nodiscard]] std::vector<double> to_genome() const {
    std::vector<double> g(speeds);
    g.insert(g.end(), feeds.begin(), feeds.end());
    return g;
  }
  static DecisionVector from_genome(std::span<const double> genome) {
    if (genome.size() % 2 != 0) throw ContractError("genome length must be even");
    const auto m = genome.size() / 2;
    return {{genome.begin(), genome.begin() + static_cast<std::ptrdiff_t>(m)},
            {genome.begin() + static_cast<std::ptrdiff_t>(m), genome.end()}};
  }
  bool operator==(const DecisionVector&) const = default;
};

namespace detail {

inline double radians(double deg) { return deg * std::numbers::pi / 180.0; }

inline void require_positive(double v, double f) {
  if (!(v > 0.0) || !(f > 0.0) || !std::isfinite(v) || !std::isfinite(f)) {
    throw DomainError("cutting speed and feed must be finite and positive");
  }
}

inline void require_dimension(const MillingPlan& plan, const DecisionVector& x,
                              std::span<const DerivedCoefficients> coeffs) {
  if (x.speeds.size() != plan.size() || x.feeds.size() != plan.size() ||
      coeffs.size() != plan.size()) {
    throw ContractError("decision vector dimension " + std::to_string(x.speeds.size()) + "/" +
                        std::to_string(x.feeds.size()) + " does not match " +
                        std::to_string(plan.size()) + " operations");
  }
}

}  // namespace detail

/// Checks every type invariant of the plan. Throws LoadError naming the
/// offending field, e.g. "operations[2].tool".
inline void validate_plan(const MillingPlan& plan) {
  auto fail = [](const std::string& key, const std::string& why) {
    throw LoadError(key + ": " + why);
  };
  const auto& e = plan.economics;
  if (e.sale_price < 0) fail("economics.sale_price", "must be >= 0");
  if (e.material_cost < 0) fail("economics.material_cost", "must be >= 0");
  if (e.labor_rate < 0) fail("economics.labor_rate", "must be >= 0");
  if (e.overhead_rate < 0) fail("economics.overhead_rate", "must be >= 0");
  if (e.setup_time < 0) fail("economics.setup_time", "must be >= 0");
  if (!(e.sale_price > e.material_cost)) {
    fail("economics.sale_price", "must exceed material_cost");
  }

  const auto& mc = plan.machine;
  if (!(mc.motor_power > 0)) fail("machine.motor_power", "must be > 0");
  if (!(mc.efficiency > 0 && mc.efficiency <= 1)) fail("machine.efficiency", "must be in (0, 1]");
  if (!(mc.wear_factor >= 1)) fail("machine.wear_factor", "must be >= 1");
  if (!(mc.power_constant > 0)) fail("machine.power_constant", "must be > 0");

  for (std::size_t i = 0; i < plan.tools.size(); ++i) {
    const auto& t = plan.tools[i];
    const auto key = "tools[" + std::to_string(i) + "]";
    if (!(t.diameter > 0)) fail(key + ".diameter", "must be > 0");
    if (t.teeth < 1) fail(key + ".teeth", "must be >= 1");
    if (!(t.life_exponent > 0 && t.life_exponent < 1)) fail(key + ".life_exponent", "must be in (0, 1)");
    if (!(t.taylor_constant > 0)) fail(key + ".taylor_constant", "must be > 0");
    if (!(t.clearance_angle > 0 && t.clearance_angle < 90)) fail(key + ".clearance_angle", "must be in (0, 90) degrees");
    if (!(t.lead_angle >= 0 && t.lead_angle < 90)) fail(key + ".lead_angle", "must be in [0, 90) degrees");
    if (t.price < 0) fail(key + ".price", "must be >= 0");
    if (t.change_time < 0) fail(key + ".change_time", "must be >= 0");
    if (t.permitted_force && !(*t.permitted_force > 0)) fail(key + ".permitted_force", "must be > 0");
    for (std::size_t j = 0; j < i; ++j) {
      if (plan.tools[j].id == t.id) fail(key + ".id", "duplicate tool id " + std::to_string(t.id));
    }
  }

  if (plan.operations.empty()) fail("operations", "at least one operation is required");
  for (std::size_t i = 0; i < plan.operations.size(); ++i) {
    const auto& op = plan.operations[i];
    const auto key = "operations[" + std::to_string(i) + "]";
    if (plan.find_tool(op.tool) == nullptr) {
      fail(key + ".tool", "references unknown tool " + std::to_string(op.tool));
    }
    if (!(op.axial_depth > 0)) fail(key + ".axial_depth", "must be > 0");
    if (!(op.radial_depth > 0)) fail(key + ".radial_depth", "must be > 0");
    if (!(op.travel > 0)) fail(key + ".travel", "must be > 0");
    if (op.surface_finish && !(*op.surface_finish > 0)) fail(key + ".surface_finish", "must be > 0");
    if (!(op.speed_bounds.min > 0 && op.speed_bounds.min < op.speed_bounds.max)) {
      fail(key + ".speed_bounds", "must satisfy 0 < min < max");
    }
    if (!(op.feed_bounds.min > 0 && op.feed_bounds.min < op.feed_bounds.max)) {
      fail(key + ".feed_bounds", "must satisfy 0 < min < max");
    }
    if (op.k3_override && !(*op.k3_override > 0)) fail(key + ".k3", "must be > 0");
    for (std::size_t j = 0; j < i; ++j) {
      if (plan.operations[j].number == op.number) {
        fail(key + ".number", "duplicate operation number " + std::to_string(op.number));
      }
    }
  }
}

/// Folds the plan into one coefficient set per operation.
///
///   K1 = pi d K / (1000 z)            machining time t_m = K1 / (V f)
///   K3 = K1 (W / C)^(1/n)             tool cost c_t K3 V^(1/n-1) f^((w+g)/n-1)
///   C5 = 0.78 Kp W z a_rad a / (60 pi d e Pm)
///   C6 = 318 / ((tan la + cot ca) Ra)  face mills
///   C7 = 318 / (4 d Ra)                end mills
///   C8 = 1 / F_c(per)
inline std::vector<DerivedCoefficients> derive_coefficients(const MillingPlan& plan) {
  const auto& mc = plan.machine;
  std::vector<DerivedCoefficients> out;
  out.reserve(plan.size());
  for (const auto& op : plan.operations) {
    const ToolSpec* tool = plan.find_tool(op.tool);
    if (tool == nullptr) {
      throw LoadError("operation " + std::to_string(op.number) + " references unknown tool " +
                      std::to_string(op.tool));
    }
    if (!(tool->clearance_angle > 0.0 && tool->clearance_angle < 90.0)) {
      throw DomainError("tool " + std::to_string(tool->id) +
                        ": clearance angle must be in (0, 90) degrees");
    }
    const double d = tool->diameter;
    const double z = tool->teeth;
    const double n = tool->life_exponent;

    DerivedCoefficients c;
    c.k1 = std::numbers::pi * d * op.travel / (1000.0 * z);
    c.k3 = op.k3_override ? *op.k3_override
                          : c.k1 * std::pow(mc.wear_factor / tool->taylor_constant, 1.0 / n);
    c.c5 = 0.78 * mc.power_constant * mc.wear_factor * z * op.radial_depth * op.axial_depth /
           (60.0 * std::numbers::pi * d * mc.efficiency * mc.motor_power);
    if (op.surface_finish) {
      const double ra = *op.surface_finish;
      if (tool->kind == ToolKind::FaceMill) {
        const double angles = std::tan(detail::radians(tool->lead_angle)) +
                              1.0 / std::tan(detail::radians(tool->clearance_angle));
        c.c6 = 318.0 / (angles * ra);
      } else {
        c.c7 = 318.0 / (4.0 * d * ra);
      }
    }
    if (tool->permitted_force) c.c8 = 1.0 / *tool->permitted_force;

    c.speed_exponent = 1.0 / n - 1.0;
    c.feed_exponent = (mc.chip_area_exponent + mc.slenderness_exponent) / n - 1.0;
    c.tool_price = tool->price;
    c.change_time = tool->change_time;
    c.force_scale = 780.0 * mc.power_constant * mc.wear_factor * z * op.radial_depth *
                    op.axial_depth / (std::numbers::pi * d);
    c.speed_bounds = op.speed_bounds;
    c.feed_bounds = op.feed_bounds;
    out.push_back(c);
  }
  return out;
}

/// t_m = K1 / (V f), minutes.
inline double machining_time(const DerivedCoefficients& c, double v, double f) {
  detail::require_positive(v, f);
  return c.k1 / (v * f);
}

inline double machining_time(std::span<const DerivedCoefficients> coeffs, std::size_t op_index,
                             double v, double f) {
  if (op_index >= coeffs.size()) throw ContractError("operation index out of range");
  return machining_time(coeffs[op_index], v, f);
}

/// Tool wear cost per part: c_t K3 V^(1/n-1) f^((w+g)/n-1).
inline double tool_cost(const DerivedCoefficients& c, double v, double f) {
  detail::require_positive(v, f);
  return c.tool_price * c.k3 * std::pow(v, c.speed_exponent) * std::pow(f, c.feed_exponent);
}

/// Time contributed by one operation: machining plus tool change.
inline double operation_time(const DerivedCoefficients& c, double v, double f) {
  return machining_time(c, v, f) + c.change_time;
}

/// Cost contributed by one operation. Machining and tool-change time are
/// charged at labour+overhead.
inline double operation_cost(double time_rate, const DerivedCoefficients& c, double v, double f) {
  return time_rate * machining_time(c, v, f) + tool_cost(c, v, f) + time_rate * c.change_time;
}

/// T_u = t_s + sum t_m,i + sum t_tc,i
inline double unit_time(const MillingPlan& plan, const DecisionVector& x,
                        std::span<const DerivedCoefficients> coeffs) {
  detail::require_dimension(plan, x, coeffs);
  double t = plan.economics.setup_time;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    t += operation_time(coeffs[i], x.speeds[i], x.feeds[i]);
  }
  return t;
}

/// C_u = c_mat + (c_l+c_o) t_s + sum over operations of operation_cost.
inline double unit_cost(const MillingPlan& plan, const DecisionVector& x,
                        std::span<const DerivedCoefficients> coeffs) {
  detail::require_dimension(plan, x, coeffs);
  const auto& e = plan.economics;
  const double rate = e.time_rate();
  double cost = e.material_cost + rate * e.setup_time;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    cost += operation_cost(rate, coeffs[i], x.speeds[i], x.feeds[i]);
  }
  return cost;
}

/// P_r = (S_p - C_u) / T_u
inline double profit_rate(double sale_price, double unit_cost, double unit_time) {
  if (!(unit_time > 0.0)) throw DomainError("unit time must be positive");
  return (sale_price - unit_cost) / unit_time;
}

inline double profit_rate(const MillingPlan& plan, const DecisionVector& x,
                          std::span<const DerivedCoefficients> coeffs) {
  return profit_rate(plan.economics.sale_price, unit_cost(plan, x, coeffs),
                     unit_time(plan, x, coeffs));
}

/// F_c = 780 Kp W z a_rad a f^0.8 / (pi d), newtons. With this force the
/// required power F_c V / 60000 kW stays at or below e P_m exactly when
/// C5 V f^0.8 <= 1.
inline double cutting_force(const DerivedCoefficients& c, double f) {
  if (!(f > 0.0)) throw DomainError("feed must be positive");
  return c.force_scale * std::pow(f, 0.8);
}

inline double cutting_force(const MillingPlan& plan, std::size_t op_index, double f) {
  if (op_index >= plan.size()) throw ContractError("operation index out of range");
  const auto coeffs = derive_coefficients(plan);
  return cutting_force(coeffs[op_index], f);
}

/// Constraint values for one operation. A constraint holds when its margin is
/// <= 1. Absent constraints hold by absence.
struct OperationMargins {
  double power = 0.0;
  std::optional<double> finish;
  std::optional<double> force;
  bool speed_in_box = true;
  bool feed_in_box = true;

  [[nodiscard]] bool power_ok() const { return power <= 1.0; }
  [[nodiscard]] bool finish_ok() const { return !finish || *finish <= 1.0; }
  [[nodiscard]] bool force_ok() const { return !force || *force <= 1.0; }
  [[nodiscard]] bool satisfied() const {
    return power_ok() && finish_ok() && force_ok() && speed_in_box && feed_in_box;
  }
};

inline OperationMargins operation_margins(const DerivedCoefficients& c, double v, double f) {
  detail::require_positive(v, f);
  OperationMargins m;
  const double f08 = std::pow(f, 0.8);
  m.power = c.c5 * v * f08;
  if (c.c6) m.finish = *c.c6 * f;
  if (c.c7) m.finish = *c.c7 * f * f;
  if (c.c8) m.force = *c.c8 * (c.force_scale * f08);
  m.speed_in_box = c.speed_bounds.contains(v);
  m.feed_in_box = c.feed_bounds.contains(f);
  return m;
}

inline std::vector<OperationMargins> constraint_margins(const MillingPlan& plan,
                                                        const DecisionVector& x,
                                                        std::span<const DerivedCoefficients> coeffs) {
  detail::require_dimension(plan, x, coeffs);
  std::vector<OperationMargins> out;
  out.reserve(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    out.push_back(operation_margins(coeffs[i], x.speeds[i], x.feeds[i]));
  }
  return out;
}

inline bool is_feasible(const MillingPlan& plan, const DecisionVector& x,
                        std::span<const DerivedCoefficients> coeffs) {
  detail::require_dimension(plan, x, coeffs);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (!operation_margins(coeffs[i], x.speeds[i], x.feeds[i]).satisfied()) return false;
  }
  return true;
}

/// Death penalty: zero for any violated constraint, otherwise the profit rate.
inline double fitness(const MillingPlan& plan, const DecisionVector& x,
                      std::span<const DerivedCoefficients> coeffs) {
  return is_feasible(plan, x, coeffs) ? profit_rate(plan, x, coeffs) : 0.0;
}

/// Notes every report carries: skipped force constraints, missing finish
/// requirements, assumed radial depths.
inline std::vector<std::string> plan_warnings(const MillingPlan& plan) {
  std::vector<std::string> w;
  for (const auto& op : plan.operations) {
    const auto n = std::to_string(op.number);
    const ToolSpec* tool = plan.find_tool(op.tool);
    if (tool != nullptr && !tool->permitted_force) {
      w.push_back("operation " + n + ": cutting-force constraint skipped (tool " +
                  std::to_string(tool->id) + " has no permitted_force)");
    }
    if (!op.surface_finish) {
      w.push_back("operation " + n + ": no surface-finish requirement");
    }
    if (op.radial_depth_assumed) {
      std::ostringstream s;
      s << "operation " << n << ": radial_depth " << op.radial_depth << " mm is an assumed value";
      w.push_back(s.str());
    }
  }
  return w;
}

}  // namespace millopt
