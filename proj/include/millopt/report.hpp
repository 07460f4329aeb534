#pragma once

/// @file report.hpp
/// @brief JSON / CSV / text reports for optimizer runs, oracle runs, point
/// evaluations and the comparison table.
///
/// JSON carries full precision. Text and CSV print costs and profit rates
/// with 4 decimals, except the comparison table which uses 2 to match the
/// published table. Every report embeds the plan warnings.

#include <cmath>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "millopt/case_study.hpp"
#include "millopt/model.hpp"
#include "millopt/optimize.hpp"
#include "millopt/oracle.hpp"

namespace millopt::report {

enum class Format { Json, Csv, Text };

using OJ = nlohmann::ordered_json;

inline std::string fixed(double x, int decimals) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(decimals) << x;
  return s.str();
}

/// Method-independent view of a solution.
struct Solution {
  std::string method;
  bool feasible = false;
  DecisionVector x;
  double unit_cost = 0.0;
  double unit_time = 0.0;
  double profit_rate = 0.0;
  OJ details = OJ::object();
  std::vector<std::string> warnings;
};

inline Solution from_run(const RunResult& r, const es::EsConfig& cfg, const MillingPlan& plan) {
  Solution s{"evolution_strategy", r.feasible, r.best, r.unit_cost, r.unit_time, r.profit_rate,
             OJ::object(), r.warnings};
  const auto rates = es::learning_rates(cfg, 2 * plan.size());
  s.details = {{"seed", r.seed},
               {"mu", cfg.mu},
               {"lambda", cfg.eta},
               {"sigma_init", cfg.sigma_init},
               {"tau_global", rates.global},
               {"tau_local", rates.local},
               {"alpha", cfg.alpha},
               {"stall_limit", cfg.stall_limit},
               {"max_generations", cfg.max_generations},
               {"sigma_floor", cfg.sigma_floor},
               {"sigma_cap_fraction",
                cfg.sigma_cap_fraction ? OJ(*cfg.sigma_cap_fraction) : OJ(nullptr)},
               {"generations", r.generations},
               {"evaluations", r.evaluations},
               {"generation_found", r.generation_found},
               {"sigmas_final", r.sigmas_final}};
  return s;
}

inline Solution from_oracle(const oracle::OracleResult& r, const oracle::GridSpec& grid,
                            std::vector<std::string> warnings) {
  Solution s{"oracle", r.feasible, r.best, r.unit_cost, r.unit_time, r.profit_rate,
             OJ::object(), std::move(warnings)};
  s.details = {{"grid_resolution", grid.resolution},
               {"dinkelbach_tolerance", grid.dinkelbach_tolerance},
               {"dinkelbach_iterations", r.iterations},
               {"lambda_trace", r.lambda_trace}};
  return s;
}

inline OJ to_json(const Solution& s, const MillingPlan& plan) {
  OJ j;
  j["method"] = s.method;
  j["feasible"] = s.feasible;
  if (s.feasible) {
    j["unit_cost"] = s.unit_cost;
    j["unit_time"] = s.unit_time;
    j["profit_rate"] = s.profit_rate;
  } else {
    j["unit_cost"] = nullptr;
    j["unit_time"] = nullptr;
    j["profit_rate"] = nullptr;
  }
  j["operations"] = OJ::array();
  if (s.feasible) {
    for (std::size_t i = 0; i < plan.size(); ++i) {
      j["operations"].push_back({{"number", plan.operations[i].number},
                                 {"speed", s.x.speeds[i]},
                                 {"feed", s.x.feeds[i]}});
    }
  }
  j["details"] = s.details;
  j["warnings"] = s.warnings;
  return j;
}

inline std::string csv_comments(const std::vector<std::string>& warnings) {
  std::string out;
  for (const auto& w : warnings) out += "# warning: " + w + "\n";
  return out;
}

inline std::string render(const Solution& s, const MillingPlan& plan, Format fmt) {
  if (fmt == Format::Json) return to_json(s, plan).dump(2) + "\n";

  std::ostringstream o;
  const auto m = plan.size();
  if (fmt == Format::Csv) {
    o << csv_comments(s.warnings);
    o << "method,feasible,C_u,T_u,P_r";
    for (std::size_t i = 0; i < m; ++i) o << ",V_" << plan.operations[i].number;
    for (std::size_t i = 0; i < m; ++i) o << ",f_" << plan.operations[i].number;
    o << "\n" << s.method << "," << (s.feasible ? "true" : "false");
    if (s.feasible) {
      o << "," << fixed(s.unit_cost, 4) << "," << fixed(s.unit_time, 4) << ","
        << fixed(s.profit_rate, 4);
      for (double v : s.x.speeds) o << "," << fixed(v, 6);
      for (double f : s.x.feeds) o << "," << fixed(f, 6);
    } else {
      o << ",,,";
      for (std::size_t i = 0; i < 2 * m; ++i) o << ",";
    }
    o << "\n";
    return o.str();
  }

  o << "method: " << s.method << "\n";
  if (!s.feasible) {
    o << "result: no feasible solution\n";
  } else {
    o << "unit cost C_u:    $" << fixed(s.unit_cost, 4) << "\n";
    o << "unit time T_u:    " << fixed(s.unit_time, 4) << " min\n";
    o << "profit rate P_r:  " << fixed(s.profit_rate, 4) << " $/min\n";
    o << "operation  V (m/min)   f (mm/tooth)\n";
    for (std::size_t i = 0; i < m; ++i) {
      o << std::setw(9) << plan.operations[i].number << "  " << std::setw(10)
        << fixed(s.x.speeds[i], 4) << "  " << std::setw(12) << fixed(s.x.feeds[i], 6) << "\n";
    }
  }
  for (const auto& [k, v] : s.details.items()) {
    if (v.is_array()) continue;
    o << k << ": " << v.dump() << "\n";
  }
  for (const auto& w : s.warnings) o << "warning: " << w << "\n";
  return o.str();
}

/// Objective, fitness and every constraint margin at a user-supplied point.
struct Evaluation {
  DecisionVector x;
  double unit_cost = 0.0;
  double unit_time = 0.0;
  double profit_rate = 0.0;
  double fitness = 0.0;
  bool feasible = false;
  std::vector<OperationMargins> margins;
  std::vector<std::string> warnings;
};

inline Evaluation evaluate(const MillingPlan& plan, const DecisionVector& x,
                           std::vector<std::string> warnings) {
  const auto coeffs = derive_coefficients(plan);
  Evaluation e;
  e.x = x;
  e.unit_cost = unit_cost(plan, x, coeffs);
  e.unit_time = unit_time(plan, x, coeffs);
  e.profit_rate = profit_rate(plan.economics.sale_price, e.unit_cost, e.unit_time);
  e.margins = constraint_margins(plan, x, coeffs);
  e.feasible = true;
  for (const auto& mg : e.margins) e.feasible = e.feasible && mg.satisfied();
  e.fitness = fitness(plan, x, coeffs);
  e.warnings = std::move(warnings);
  return e;
}

inline std::string render(const Evaluation& e, const MillingPlan& plan, Format fmt) {
  const auto m = plan.size();
  auto opt = [](const std::optional<double>& v) -> OJ { return v ? OJ(*v) : OJ(nullptr); };

  if (fmt == Format::Json) {
    OJ j;
    j["method"] = "evaluate";
    j["assignment"] = {{"speeds", e.x.speeds}, {"feeds", e.x.feeds}};
    j["feasible"] = e.feasible;
    j["fitness"] = e.fitness;
    j["unit_cost"] = e.unit_cost;
    j["unit_time"] = e.unit_time;
    j["profit_rate"] = e.profit_rate;
    j["operations"] = OJ::array();
    for (std::size_t i = 0; i < m; ++i) {
      const auto& mg = e.margins[i];
      const auto& op = plan.operations[i];
      j["operations"].push_back(
          {{"number", op.number},
           {"speed", e.x.speeds[i]},
           {"feed", e.x.feeds[i]},
           {"power", {{"margin", mg.power}, {"satisfied", mg.power_ok()}}},
           {"finish", {{"margin", opt(mg.finish)}, {"satisfied", mg.finish_ok()}}},
           {"force", {{"margin", opt(mg.force)}, {"satisfied", mg.force_ok()}}},
           {"speed_box",
            {{"bounds", {op.speed_bounds.min, op.speed_bounds.max}}, {"satisfied", mg.speed_in_box}}},
           {"feed_box",
            {{"bounds", {op.feed_bounds.min, op.feed_bounds.max}}, {"satisfied", mg.feed_in_box}}},
           {"satisfied", mg.satisfied()}});
    }
    j["warnings"] = e.warnings;
    return j.dump(2) + "\n";
  }

  auto margin_text = [](const std::optional<double>& v) { return v ? fixed(*v, 4) : std::string("-"); };
  auto status = [](bool ok) { return ok ? std::string("satisfied") : std::string("violated"); };

  std::ostringstream o;
  if (fmt == Format::Csv) {
    o << csv_comments(e.warnings);
    o << "# C_u=" << fixed(e.unit_cost, 4) << " T_u=" << fixed(e.unit_time, 4)
      << " P_r=" << fixed(e.profit_rate, 4) << " fitness=" << fixed(e.fitness, 4)
      << " feasible=" << (e.feasible ? "true" : "false") << "\n";
    o << "operation,V,f,power,finish,force,speed_box,feed_box,status\n";
    for (std::size_t i = 0; i < m; ++i) {
      const auto& mg = e.margins[i];
      o << plan.operations[i].number << "," << fixed(e.x.speeds[i], 6) << ","
        << fixed(e.x.feeds[i], 6) << "," << fixed(mg.power, 4) << "," << margin_text(mg.finish)
        << "," << margin_text(mg.force) << "," << status(mg.speed_in_box) << ","
        << status(mg.feed_in_box) << "," << status(mg.satisfied()) << "\n";
    }
    return o.str();
  }

  o << "assignment:\n";
  for (std::size_t i = 0; i < m; ++i) {
    o << "  operation " << plan.operations[i].number << ": V=" << fixed(e.x.speeds[i], 4)
      << " m/min, f=" << fixed(e.x.feeds[i], 6) << " mm/tooth\n";
  }
  o << "unit cost C_u:    $" << fixed(e.unit_cost, 4) << "\n";
  o << "unit time T_u:    " << fixed(e.unit_time, 4) << " min\n";
  o << "profit rate P_r:  " << fixed(e.profit_rate, 4) << " $/min\n";
  o << "fitness:          " << fixed(e.fitness, 4) << (e.feasible ? "" : " (death penalty)") << "\n";
  for (std::size_t i = 0; i < m; ++i) {
    const auto& mg = e.margins[i];
    o << "operation " << plan.operations[i].number << ":\n";
    o << "  power      " << std::setw(10) << fixed(mg.power, 4) << "  " << status(mg.power_ok()) << "\n";
    o << "  finish     " << std::setw(10) << margin_text(mg.finish) << "  " << status(mg.finish_ok()) << "\n";
    o << "  force      " << std::setw(10) << margin_text(mg.force) << "  " << status(mg.force_ok()) << "\n";
    o << "  speed_box  " << std::setw(10) << "" << "  " << status(mg.speed_in_box) << "\n";
    o << "  feed_box   " << std::setw(10) << "" << "  " << status(mg.feed_in_box) << "\n";
  }
  for (const auto& w : e.warnings) o << "warning: " << w << "\n";
  return o.str();
}

struct ComparisonRow {
  std::string method;
  std::optional<double> unit_cost;
  std::optional<double> unit_time;
  std::optional<double> profit_rate;
  std::string source;  // "published" or "computed"
};

/// Gap between the computed ES row and the published ES row.
struct Reproduction {
  std::string reference_method;
  double published_profit_rate = 0.0;
  double published_unit_cost = 0.0;
  double computed_profit_rate = 0.0;
  double computed_unit_cost = 0.0;
  double profit_rate_gap = 0.0;  // relative
  double unit_cost_gap = 0.0;    // relative
  double tolerance = 0.05;

  [[nodiscard]] bool within_tolerance() const {
    return std::abs(profit_rate_gap) <= tolerance && std::abs(unit_cost_gap) <= tolerance;
  }
};

inline const std::string kComputedEsMethod = "Evolutionary strategy (this implementation)";
inline const std::string kOracleMethod = "Oracle (grid)";
inline const std::string kPublishedEsMethod = "Evolutionary strategy";

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::optional<Reproduction> reproduction;
  std::vector<std::string> warnings;
};

inline Comparison compare(const std::vector<ReferenceRow>& references, const RunResult& run,
                          const oracle::OracleResult& grid_result,
                          std::vector<std::string> warnings) {
  Comparison c;
  for (const auto& r : references) {
    c.rows.push_back({r.method, r.unit_cost, r.unit_time, r.profit_rate, "published"});
  }
  auto computed = [](const std::string& name, bool feasible, double cu, double tu, double pr) {
    if (!feasible) return ComparisonRow{name, std::nullopt, std::nullopt, std::nullopt, "computed"};
    return ComparisonRow{name, cu, tu, pr, "computed"};
  };
  c.rows.push_back(computed(kComputedEsMethod, run.feasible, run.unit_cost, run.unit_time,
                            run.profit_rate));
  c.rows.push_back(computed(kOracleMethod, grid_result.feasible, grid_result.unit_cost,
                            grid_result.unit_time, grid_result.profit_rate));

  for (const auto& r : references) {
    if (r.method != kPublishedEsMethod || !run.feasible) continue;
    Reproduction rep;
    rep.reference_method = r.method;
    rep.published_profit_rate = r.profit_rate;
    rep.published_unit_cost = r.unit_cost;
    rep.computed_profit_rate = run.profit_rate;
    rep.computed_unit_cost = run.unit_cost;
    rep.profit_rate_gap = (run.profit_rate - r.profit_rate) / r.profit_rate;
    rep.unit_cost_gap = (run.unit_cost - r.unit_cost) / r.unit_cost;
    c.reproduction = rep;
  }
  c.warnings = std::move(warnings);
  return c;
}

inline std::string reproduction_line(const Reproduction& r) {
  std::ostringstream o;
  o << "reproduction vs '" << r.reference_method << "': P_r " << fixed(r.computed_profit_rate, 4)
    << " vs " << fixed(r.published_profit_rate, 2) << " (gap " << fixed(100.0 * r.profit_rate_gap, 2)
    << "%), C_u " << fixed(r.computed_unit_cost, 4) << " vs " << fixed(r.published_unit_cost, 2)
    << " (gap " << fixed(100.0 * r.unit_cost_gap, 2) << "%), tolerance "
    << fixed(100.0 * r.tolerance, 0) << "%: " << (r.within_tolerance() ? "within" : "outside");
  return o.str();
}

inline std::string render(const Comparison& c, Format fmt) {
  if (fmt == Format::Json) {
    OJ j;
    j["rows"] = OJ::array();
    auto opt = [](const std::optional<double>& v) -> OJ { return v ? OJ(*v) : OJ(nullptr); };
    for (const auto& r : c.rows) {
      j["rows"].push_back({{"method", r.method},
                           {"unit_cost", opt(r.unit_cost)},
                           {"unit_time", opt(r.unit_time)},
                           {"profit_rate", opt(r.profit_rate)},
                           {"source", r.source}});
    }
    if (c.reproduction) {
      const auto& r = *c.reproduction;
      j["reproduction"] = {{"reference_method", r.reference_method},
                           {"published_profit_rate", r.published_profit_rate},
                           {"computed_profit_rate", r.computed_profit_rate},
                           {"profit_rate_gap", r.profit_rate_gap},
                           {"published_unit_cost", r.published_unit_cost},
                           {"computed_unit_cost", r.computed_unit_cost},
                           {"unit_cost_gap", r.unit_cost_gap},
                           {"tolerance", r.tolerance},
                           {"within_tolerance", r.within_tolerance()}};
    } else {
      j["reproduction"] = nullptr;
    }
    j["warnings"] = c.warnings;
    return j.dump(2) + "\n";
  }

  auto cell = [](const std::optional<double>& v) { return v ? fixed(*v, 2) : std::string(); };
  std::ostringstream o;
  if (fmt == Format::Csv) {
    o << csv_comments(c.warnings);
    if (c.reproduction) o << "# " << reproduction_line(*c.reproduction) << "\n";
    o << "method,C_u,T_u,P_r\n";
    for (const auto& r : c.rows) {
      const bool quote = r.method.find(',') != std::string::npos;
      o << (quote ? "\"" + r.method + "\"" : r.method) << "," << cell(r.unit_cost) << ","
        << cell(r.unit_time) << "," << cell(r.profit_rate) << "\n";
    }
    return o.str();
  }

  o << std::left << std::setw(46) << "method" << std::right << std::setw(10) << "C_u ($)"
    << std::setw(12) << "T_u (min)" << std::setw(14) << "P_r ($/min)" << "\n";
  for (const auto& r : c.rows) {
    auto shown = [](const std::optional<double>& v) { return v ? fixed(*v, 2) : std::string("n/a"); };
    o << std::left << std::setw(46) << r.method << std::right << std::setw(10) << shown(r.unit_cost)
      << std::setw(12) << shown(r.unit_time) << std::setw(14) << shown(r.profit_rate) << "\n";
  }
  if (c.reproduction) o << reproduction_line(*c.reproduction) << "\n";
  for (const auto& w : c.warnings) o << "warning: " << w << "\n";
  return o.str();
}

}  // namespace millopt::report
