// Optimise the bundled case study and compare with the grid oracle.

#include <iostream>

#include "millopt/millopt.hpp"

int main() {
  const auto bc = millopt::builtin_case();

  millopt::es::EsConfig cfg;
  cfg.seed = 7;
  const auto run = millopt::optimize(bc.plan, cfg);

  const auto coeffs = millopt::derive_coefficients(bc.plan);
  const auto grid = millopt::oracle::dinkelbach_solve(bc.plan, coeffs, {.resolution = 400});

  std::cout << "ES:     P_r = " << run.profit_rate << " after " << run.generations << " generations\n";
  std::cout << "oracle: P_r = " << grid.profit_rate << " (" << grid.iterations << " Dinkelbach steps)\n";
  for (std::size_t i = 0; i < bc.plan.size(); ++i) {
    std::cout << "  op " << bc.plan.operations[i].number << ": V=" << run.best.speeds[i]
              << " f=" << run.best.feeds[i] << "\n";
  }
}
