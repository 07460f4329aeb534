#pragma once

/// @file case_study.hpp
/// @brief Plan documents (JSON) and the bundled five-operation case study.
///
/// Document layout, all units fixed (see README for the annotated example):
///
///   economics   sale_price material_cost labor_rate overhead_rate setup_time
///   machine     motor_power efficiency power_constant wear_factor
///               chip_area_exponent slenderness_exponent
///   tools[]     id kind quality diameter teeth price lead_angle
///               clearance_angle taylor_constant life_exponent change_time
///               [permitted_force]
///   operations[] number kind tool axial_depth radial_depth
///               [radial_depth_assumed] travel [surface_finish]
///               [speed_bounds] [feed_bounds] [k3]
///   [es]        mu eta sigma_init tau_global tau_local alpha stall_limit
///               max_generations seed sigma_floor sigma_cap_fraction
///               (all optional; sigma_cap_fraction null disables the cap)
///   [oracle]    resolution dinkelbach_tolerance max_dinkelbach_iterations
///   [reference_results[]] method unit_cost unit_time profit_rate
///
/// Unknown keys are rejected.

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "millopt/errors.hpp"
#include "millopt/es.hpp"
#include "millopt/model.hpp"
#include "millopt/oracle.hpp"

namespace millopt {

/// A published comparison result; values exactly as printed (two decimals).
struct ReferenceRow {
  std::string method;
  double unit_cost = 0.0;
  double unit_time = 0.0;
  double profit_rate = 0.0;
  bool operator==(const ReferenceRow&) const = default;
};

struct LoadedPlan {
  MillingPlan plan;
  es::EsConfig es;
  oracle::GridSpec grid;
  std::vector<ReferenceRow> references;
  std::vector<std::string> warnings;
};

struct BuiltinCase {
  MillingPlan plan;
  std::vector<ReferenceRow> references;
};

inline std::string to_string(ToolKind k) { return k == ToolKind::FaceMill ? "face_mill" : "end_mill"; }
inline std::string to_string(ToolQuality q) { return q == ToolQuality::HSS ? "hss" : "carbide"; }
inline std::string to_string(OperationKind k) {
  switch (k) {
    case OperationKind::Face: return "face";
    case OperationKind::Corner: return "corner";
    case OperationKind::Pocket: return "pocket";
    case OperationKind::Slot: return "slot";
  }
  return "?";
}

/// The five-operation, three-tool CNC milling instance (10L50 leaded steel,
/// 8.5 kW vertical machine) with its published comparison results.
inline BuiltinCase builtin_case() {
  BuiltinCase bc;
  auto& p = bc.plan;
  p.economics = {25.0, 0.50, 0.45, 1.45, 2.0};
  p.machine = {8.5, 0.95, 2.24, 1.1, 0.28, 0.14};

  constexpr double kTtc = 0.5;
  p.tools = {
      {1, ToolKind::FaceMill, ToolQuality::Carbide, 50.0, 6, 49.50, 45.0, 5.0, 100.05, 0.3, std::nullopt, kTtc},
      {2, ToolKind::EndMill, ToolQuality::HSS, 10.0, 4, 7.55, 0.0, 5.0, 33.98, 0.15, std::nullopt, kTtc},
      {3, ToolKind::EndMill, ToolQuality::HSS, 12.0, 4, 7.55, 0.0, 5.0, 33.98, 0.15, std::nullopt, kTtc},
  };

  auto op = [](int number, OperationKind kind, int tool, double a, double a_rad, double travel,
               std::optional<double> ra) {
    return OperationSpec{number, kind, tool, a, a_rad, true, travel, ra,
                         default_speed_bounds(kind), default_feed_bounds(kind), std::nullopt};
  };
  // Radial depths are not published: face cut at full cutter width, corner and
  // pocket at their axial depth, slots at full cutter width.
  p.operations = {
      op(1, OperationKind::Face, 1, 10.0, 50.0, 450.0, 2.0),
      op(2, OperationKind::Corner, 2, 5.0, 5.0, 90.0, 6.0),
      op(3, OperationKind::Pocket, 2, 10.0, 10.0, 450.0, 5.0),
      op(4, OperationKind::Slot, 3, 10.0, 12.0, 32.0, std::nullopt),
      op(5, OperationKind::Slot, 3, 5.0, 12.0, 84.0, 1.0),
  };

  bc.references = {
      {"Handbook", 18.36, 9.40, 0.71},
      {"Method of feasible direction", 11.35, 5.48, 2.49},
      {"Genetic algorithm", 11.11, 5.22, 2.65},
      {"Ant colony algorithm", 10.20, 5.43, 2.72},
      {"Hybrid particle swarm", 10.90, 5.05, 2.79},
      {"Immune algorithm", 11.08, 5.07, 2.75},
      {"Hybrid immune algorithm", 10.91, 5.07, 2.79},
      {"Hybrid differential evolution algorithm", 10.90, 5.00, 2.82},
      {"Evolutionary strategy", 10.91, 5.00, 2.82},
  };
  return bc;
}

namespace detail {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

inline void reject_unknown(const Json& obj, const std::string& path,
                           std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw LoadError(path + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw LoadError((path.empty() ? key : path + "." + key) + ": unknown key");
  }
}

inline const Json& require(const Json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) throw LoadError(path + "." + key + ": required key missing");
  return obj.at(key);
}

inline double number(const Json& obj, const std::string& path, const std::string& key) {
  const auto& v = require(obj, path, key);
  if (!v.is_number()) throw LoadError(path + "." + key + ": expected a number");
  return v.get<double>();
}

inline std::optional<double> optional_number(const Json& obj, const std::string& path,
                                             const std::string& key) {
  if (!obj.contains(key)) return std::nullopt;
  return number(obj, path, key);
}

inline long long integer(const Json& obj, const std::string& path, const std::string& key) {
  const auto& v = require(obj, path, key);
  if (!v.is_number_integer()) throw LoadError(path + "." + key + ": expected an integer");
  return v.get<long long>();
}

inline std::size_t count(const Json& obj, const std::string& path, const std::string& key) {
  const auto& v = require(obj, path, key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
    throw LoadError(path + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

inline std::string text(const Json& obj, const std::string& path, const std::string& key) {
  const auto& v = require(obj, path, key);
  if (!v.is_string()) throw LoadError(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

inline Interval interval(const Json& obj, const std::string& path, const std::string& key) {
  const auto& v = require(obj, path, key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw LoadError(path + "." + key + ": expected [min, max]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

inline const Json& array(const Json& obj, const std::string& key) {
  if (!obj.contains(key)) throw LoadError(key + ": required key missing");
  const auto& v = obj.at(key);
  if (!v.is_array()) throw LoadError(key + ": expected a list");
  return v;
}

inline ToolKind parse_tool_kind(const std::string& s, const std::string& path) {
  if (s == "face_mill") return ToolKind::FaceMill;
  if (s == "end_mill") return ToolKind::EndMill;
  throw LoadError(path + ": expected face_mill or end_mill, got '" + s + "'");
}

inline ToolQuality parse_quality(const std::string& s, const std::string& path) {
  if (s == "hss") return ToolQuality::HSS;
  if (s == "carbide") return ToolQuality::Carbide;
  throw LoadError(path + ": expected hss or carbide, got '" + s + "'");
}

inline OperationKind parse_operation_kind(const std::string& s, const std::string& path) {
  if (s == "face") return OperationKind::Face;
  if (s == "corner") return OperationKind::Corner;
  if (s == "pocket") return OperationKind::Pocket;
  if (s == "slot") return OperationKind::Slot;
  throw LoadError(path + ": expected face, corner, pocket or slot, got '" + s + "'");
}

}  // namespace detail

/// Parses and validates a plan document.
inline LoadedPlan load_plan(const nlohmann::json& doc) {
  using namespace detail;
  reject_unknown(doc, "", {"economics", "machine", "tools", "operations", "es", "oracle",
                           "reference_results"});
  LoadedPlan out;
  auto& plan = out.plan;

  {
    const auto& e = require(doc, "", "economics");
    const std::string p = "economics";
    reject_unknown(e, p, {"sale_price", "material_cost", "labor_rate", "overhead_rate", "setup_time"});
    plan.economics = {number(e, p, "sale_price"), number(e, p, "material_cost"),
                      number(e, p, "labor_rate"), number(e, p, "overhead_rate"),
                      number(e, p, "setup_time")};
  }
  {
    const auto& m = require(doc, "", "machine");
    const std::string p = "machine";
    reject_unknown(m, p, {"motor_power", "efficiency", "power_constant", "wear_factor",
                          "chip_area_exponent", "slenderness_exponent"});
    plan.machine = {number(m, p, "motor_power"), number(m, p, "efficiency"),
                    number(m, p, "power_constant"), number(m, p, "wear_factor"),
                    number(m, p, "chip_area_exponent"), number(m, p, "slenderness_exponent")};
  }

  const auto& tools = array(doc, "tools");
  for (std::size_t i = 0; i < tools.size(); ++i) {
    const auto& t = tools[i];
    const std::string p = "tools[" + std::to_string(i) + "]";
    reject_unknown(t, p, {"id", "kind", "quality", "diameter", "teeth", "price", "lead_angle",
                          "clearance_angle", "taylor_constant", "life_exponent", "change_time",
                          "permitted_force"});
    ToolSpec spec;
    spec.id = static_cast<int>(integer(t, p, "id"));
    spec.kind = parse_tool_kind(text(t, p, "kind"), p + ".kind");
    spec.quality = parse_quality(text(t, p, "quality"), p + ".quality");
    spec.diameter = number(t, p, "diameter");
    spec.teeth = static_cast<int>(integer(t, p, "teeth"));
    spec.price = number(t, p, "price");
    spec.lead_angle = number(t, p, "lead_angle");
    spec.clearance_angle = number(t, p, "clearance_angle");
    spec.taylor_constant = number(t, p, "taylor_constant");
    spec.life_exponent = number(t, p, "life_exponent");
    spec.change_time = number(t, p, "change_time");
    spec.permitted_force = optional_number(t, p, "permitted_force");
    plan.tools.push_back(spec);
  }

  const auto& ops = array(doc, "operations");
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto& o = ops[i];
    const std::string p = "operations[" + std::to_string(i) + "]";
    reject_unknown(o, p, {"number", "kind", "tool", "axial_depth", "radial_depth",
                          "radial_depth_assumed", "travel", "surface_finish", "speed_bounds",
                          "feed_bounds", "k3"});
    OperationSpec spec;
    spec.number = static_cast<int>(integer(o, p, "number"));
    spec.kind = parse_operation_kind(text(o, p, "kind"), p + ".kind");
    spec.tool = static_cast<int>(integer(o, p, "tool"));
    spec.axial_depth = number(o, p, "axial_depth");
    spec.radial_depth = number(o, p, "radial_depth");
    if (o.contains("radial_depth_assumed")) {
      if (!o["radial_depth_assumed"].is_boolean()) {
        throw LoadError(p + ".radial_depth_assumed: expected true or false");
      }
      spec.radial_depth_assumed = o["radial_depth_assumed"].get<bool>();
    }
    spec.travel = number(o, p, "travel");
    spec.surface_finish = optional_number(o, p, "surface_finish");
    spec.speed_bounds = o.contains("speed_bounds") ? interval(o, p, "speed_bounds")
                                                   : default_speed_bounds(spec.kind);
    spec.feed_bounds = o.contains("feed_bounds") ? interval(o, p, "feed_bounds")
                                                 : default_feed_bounds(spec.kind);
    spec.k3_override = optional_number(o, p, "k3");
    plan.operations.push_back(spec);
  }

  validate_plan(plan);

  if (doc.contains("es")) {
    const auto& e = doc["es"];
    const std::string p = "es";
    reject_unknown(e, p, {"mu", "eta", "sigma_init", "tau_global", "tau_local", "alpha",
                          "stall_limit", "max_generations", "seed", "sigma_floor",
                          "sigma_cap_fraction"});
    auto& c = out.es;
    if (e.contains("mu")) c.mu = count(e, p, "mu");
    if (e.contains("eta")) c.eta = count(e, p, "eta");
    if (e.contains("sigma_init")) c.sigma_init = number(e, p, "sigma_init");
    c.tau_global = optional_number(e, p, "tau_global");
    c.tau_local = optional_number(e, p, "tau_local");
    if (e.contains("alpha")) c.alpha = number(e, p, "alpha");
    if (e.contains("stall_limit")) c.stall_limit = count(e, p, "stall_limit");
    if (e.contains("max_generations")) c.max_generations = count(e, p, "max_generations");
    if (e.contains("seed")) c.seed = count(e, p, "seed");
    if (e.contains("sigma_floor")) c.sigma_floor = number(e, p, "sigma_floor");
    if (e.contains("sigma_cap_fraction")) {
      c.sigma_cap_fraction = e["sigma_cap_fraction"].is_null()
                                 ? std::nullopt
                                 : std::optional<double>(number(e, p, "sigma_cap_fraction"));
    }
    try {
      c.validate();
    } catch (const ContractError& err) {
      throw LoadError(std::string("es: ") + err.what());
    }
  }
  if (doc.contains("oracle")) {
    const auto& g = doc["oracle"];
    const std::string p = "oracle";
    reject_unknown(g, p, {"resolution", "dinkelbach_tolerance", "max_dinkelbach_iterations"});
    if (g.contains("resolution")) out.grid.resolution = count(g, p, "resolution");
    if (g.contains("dinkelbach_tolerance")) {
      out.grid.dinkelbach_tolerance = number(g, p, "dinkelbach_tolerance");
    }
    if (g.contains("max_dinkelbach_iterations")) {
      out.grid.max_dinkelbach_iterations = count(g, p, "max_dinkelbach_iterations");
    }
    try {
      out.grid.validate();
    } catch (const ContractError& err) {
      throw LoadError(std::string("oracle: ") + err.what());
    }
  }
  if (doc.contains("reference_results")) {
    const auto& rows = array(doc, "reference_results");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string p = "reference_results[" + std::to_string(i) + "]";
      reject_unknown(rows[i], p, {"method", "unit_cost", "unit_time", "profit_rate"});
      out.references.push_back({text(rows[i], p, "method"), number(rows[i], p, "unit_cost"),
                                number(rows[i], p, "unit_time"), number(rows[i], p, "profit_rate")});
    }
  }

  out.warnings = plan_warnings(plan);
  return out;
}

inline LoadedPlan load_plan_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(std::string("document is not valid JSON: ") + e.what());
  }
  return load_plan(doc);
}

inline LoadedPlan load_plan_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path + ": cannot open plan document");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_plan_text(buf.str());
}

inline LoadedPlan load_builtin() {
  auto bc = builtin_case();
  LoadedPlan out;
  out.plan = std::move(bc.plan);
  out.references = std::move(bc.references);
  out.warnings = plan_warnings(out.plan);
  return out;
}

/// Plan (and optional reference rows) as a document with a fixed key order.
inline nlohmann::ordered_json to_document(const MillingPlan& plan,
                                          const std::vector<ReferenceRow>& references = {}) {
  using OJ = nlohmann::ordered_json;
  OJ doc;
  const auto& e = plan.economics;
  doc["economics"] = {{"sale_price", e.sale_price},       {"material_cost", e.material_cost},
                      {"labor_rate", e.labor_rate},       {"overhead_rate", e.overhead_rate},
                      {"setup_time", e.setup_time}};
  const auto& m = plan.machine;
  doc["machine"] = {{"motor_power", m.motor_power},
                    {"efficiency", m.efficiency},
                    {"power_constant", m.power_constant},
                    {"wear_factor", m.wear_factor},
                    {"chip_area_exponent", m.chip_area_exponent},
                    {"slenderness_exponent", m.slenderness_exponent}};
  doc["tools"] = OJ::array();
  for (const auto& t : plan.tools) {
    OJ j = {{"id", t.id},
            {"kind", to_string(t.kind)},
            {"quality", to_string(t.quality)},
            {"diameter", t.diameter},
            {"teeth", t.teeth},
            {"price", t.price},
            {"lead_angle", t.lead_angle},
            {"clearance_angle", t.clearance_angle},
            {"taylor_constant", t.taylor_constant},
            {"life_exponent", t.life_exponent},
            {"change_time", t.change_time}};
    if (t.permitted_force) j["permitted_force"] = *t.permitted_force;
    doc["tools"].push_back(std::move(j));
  }
  doc["operations"] = OJ::array();
  for (const auto& o : plan.operations) {
    OJ j = {{"number", o.number},
            {"kind", to_string(o.kind)},
            {"tool", o.tool},
            {"axial_depth", o.axial_depth},
            {"radial_depth", o.radial_depth},
            {"radial_depth_assumed", o.radial_depth_assumed},
            {"travel", o.travel}};
    if (o.surface_finish) j["surface_finish"] = *o.surface_finish;
    j["speed_bounds"] = {o.speed_bounds.min, o.speed_bounds.max};
    j["feed_bounds"] = {o.feed_bounds.min, o.feed_bounds.max};
    if (o.k3_override) j["k3"] = *o.k3_override;
    doc["operations"].push_back(std::move(j));
  }
  if (!references.empty()) {
    doc["reference_results"] = OJ::array();
    for (const auto& r : references) {
      doc["reference_results"].push_back({{"method", r.method},
                                          {"unit_cost", r.unit_cost},
                                          {"unit_time", r.unit_time},
                                          {"profit_rate", r.profit_rate}});
    }
  }
  return doc;
}

/// Serialised form: two-space indent, trailing newline.
inline std::string to_document_text(const MillingPlan& plan,
                                    const std::vector<ReferenceRow>& references = {}) {
  return to_document(plan, references).dump(2) + "\n";
}

}  // namespace millopt
