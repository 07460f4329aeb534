// millopt: optimise milling speeds and feeds for maximum profit rate.
//
//   millopt optimize --builtin-case --seed 42 --out json
//   millopt oracle   --config plan.json --grid-resolution 500
//   millopt evaluate --builtin-case --speeds 90,40,40,30,31 --feeds 0.078,0.3,0.3,0.5,0.39
//   millopt compare  --builtin-case --out csv
//
// Exit codes: 0 success, 2 usage or schema error, 3 no feasible solution.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "millopt/millopt.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;

struct CommonOptions {
  std::string config;
  bool builtin = false;
  std::string out = "text";
  std::string output;
};

struct EsOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> mu;
  std::optional<std::size_t> lambda;
  std::optional<std::size_t> stall;
  std::optional<std::size_t> max_generations;
  std::optional<double> alpha;
  std::optional<double> sigma_init;
  std::optional<double> sigma_cap;
  bool no_sigma_cap = false;
  bool verbose = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  auto* cfg = cmd->add_option("--config", o.config, "Plan document (JSON)")->check(CLI::ExistingFile);
  auto* builtin = cmd->add_flag("--builtin-case", o.builtin, "Use the bundled five-operation case study");
  cfg->excludes(builtin);
  cmd->add_option("--out", o.out, "Report format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
  cmd->add_option("--output", o.output, "Write the report here instead of standard output");
}

void add_es(CLI::App* cmd, EsOptions& o) {
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--mu", o.mu, "Parents kept per generation")->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", o.lambda, "Children per generation")->check(CLI::PositiveNumber);
  cmd->add_option("--stall", o.stall, "Stop after this many generations without improvement")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-generations", o.max_generations, "Hard generation cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", o.alpha, "Intermediate recombination weight in (0,1)");
  cmd->add_option("--sigma-init", o.sigma_init, "Initial mutation strength");
  auto* cap = cmd->add_option("--sigma-cap", o.sigma_cap,
                              "Cap mutation strengths at this fraction of the box width");
  cmd->add_flag("--no-sigma-cap", o.no_sigma_cap, "Leave mutation strengths uncapped")->excludes(cap);
  cmd->add_flag("--verbose", o.verbose, "Log one line per generation to standard error");
}

millopt::report::Format parse_format(const std::string& s) {
  if (s == "json") return millopt::report::Format::Json;
  if (s == "csv") return millopt::report::Format::Csv;
  return millopt::report::Format::Text;
}

millopt::LoadedPlan load(const CommonOptions& o) {
  if (o.builtin) return millopt::load_builtin();
  if (o.config.empty()) throw UsageError("one of --config PATH or --builtin-case is required");
  return millopt::load_plan_file(o.config);
}

millopt::es::EsConfig es_config(const millopt::LoadedPlan& plan, const EsOptions& o) {
  auto cfg = plan.es;
  if (o.seed) cfg.seed = *o.seed;
  if (o.mu) cfg.mu = *o.mu;
  if (o.lambda) cfg.eta = *o.lambda;
  if (o.stall) cfg.stall_limit = *o.stall;
  if (o.max_generations) cfg.max_generations = *o.max_generations;
  if (o.alpha) cfg.alpha = *o.alpha;
  if (o.sigma_init) cfg.sigma_init = *o.sigma_init;
  if (o.sigma_cap) cfg.sigma_cap_fraction = *o.sigma_cap;
  if (o.no_sigma_cap) cfg.sigma_cap_fraction.reset();
  try {
    cfg.validate();
  } catch (const millopt::ContractError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

millopt::oracle::GridSpec grid_spec(const millopt::LoadedPlan& plan, std::optional<std::size_t> res) {
  auto grid = plan.grid;
  if (res) grid.resolution = *res;
  return grid;
}

millopt::RunResult run_es(const millopt::LoadedPlan& plan, const millopt::es::EsConfig& cfg,
                          bool verbose) {
  if (!verbose) return millopt::optimize(plan.plan, cfg);
  return millopt::optimize(plan.plan, cfg, [](const millopt::es::EsState& s) {
    std::cerr << "generation " << s.generation << " best "
              << (s.best.individual ? millopt::report::fixed(s.best.fitness, 6) : std::string("none"))
              << " stall " << s.best.stall_counter << "\n";
  });
}

void emit(const CommonOptions& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(o.output, std::ios::binary);
  if (!f) throw UsageError("cannot write " + o.output);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Milling speed/feed optimisation by a self-adaptive evolution strategy"};
  app.require_subcommand(1);

  CommonOptions opt_common, orc_common, eval_common, cmp_common;
  EsOptions opt_es, cmp_es;
  std::optional<std::size_t> orc_res, cmp_res;
  std::vector<double> speeds, feeds;

  auto* optimize = app.add_subcommand("optimize", "Run the evolution strategy on a plan");
  add_common(optimize, opt_common);
  add_es(optimize, opt_es);

  auto* oracle = app.add_subcommand("oracle", "Grid + Dinkelbach optimum of a plan");
  add_common(oracle, orc_common);
  oracle->add_option("--grid-resolution", orc_res, "Grid points per axis (>= 2)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate objective and constraints at a point");
  add_common(evaluate, eval_common);
  evaluate->add_option("--speeds", speeds, "Cutting speeds V_1..V_m (m/min), comma separated")
      ->delimiter(',')
      ->required();
  evaluate->add_option("--feeds", feeds, "Feeds f_1..f_m (mm/tooth), comma separated")
      ->delimiter(',')
      ->required();

  auto* compare = app.add_subcommand("compare", "Published results next to this implementation");
  add_common(compare, cmp_common);
  add_es(compare, cmp_es);
  compare->add_option("--grid-resolution", cmp_res, "Oracle grid points per axis (>= 2)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*optimize) {
      const auto plan = load(opt_common);
      const auto cfg = es_config(plan, opt_es);
      const auto result = run_es(plan, cfg, opt_es.verbose);
      const auto sol = millopt::report::from_run(result, cfg, plan.plan);
      emit(opt_common, millopt::report::render(sol, plan.plan, parse_format(opt_common.out)));
      return result.feasible ? kExitOk : kExitInfeasible;
    }
    if (*oracle) {
      const auto plan = load(orc_common);
      const auto grid = grid_spec(plan, orc_res);
      const auto coeffs = millopt::derive_coefficients(plan.plan);
      const auto result = millopt::oracle::dinkelbach_solve(plan.plan, coeffs, grid);
      const auto sol = millopt::report::from_oracle(result, grid, plan.warnings);
      emit(orc_common, millopt::report::render(sol, plan.plan, parse_format(orc_common.out)));
      return result.feasible ? kExitOk : kExitInfeasible;
    }
    if (*evaluate) {
      const auto plan = load(eval_common);
      if (speeds.size() != plan.plan.size() || feeds.size() != plan.plan.size()) {
        throw UsageError("expected " + std::to_string(plan.plan.size()) + " speeds and " +
                         std::to_string(plan.plan.size()) + " feeds, got " +
                         std::to_string(speeds.size()) + " and " + std::to_string(feeds.size()));
      }
      const auto ev = millopt::report::evaluate(plan.plan, {speeds, feeds}, plan.warnings);
      emit(eval_common, millopt::report::render(ev, plan.plan, parse_format(eval_common.out)));
      return kExitOk;
    }
    if (*compare) {
      const auto plan = load(cmp_common);
      const auto cfg = es_config(plan, cmp_es);
      const auto run = run_es(plan, cfg, cmp_es.verbose);
      const auto coeffs = millopt::derive_coefficients(plan.plan);
      const auto grid = millopt::oracle::dinkelbach_solve(plan.plan, coeffs, grid_spec(plan, cmp_res));
      const auto table = millopt::report::compare(plan.references, run, grid, plan.warnings);
      emit(cmp_common, millopt::report::render(table, parse_format(cmp_common.out)));
      return run.feasible && grid.feasible ? kExitOk : kExitInfeasible;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const millopt::LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const millopt::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const millopt::ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const millopt::oracle::OracleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
