#ifndef SPECMKT_GOV_HPP
#define SPECMKT_GOV_HPP

// Government stage: sweep the subsidy split, solve the providers' game at
// each grid point, and keep the welfare-maximizing allocation.

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "specmkt/best_response.hpp"
#include "specmkt/market.hpp"

namespace specmkt {

struct SweepOptions {
  int grid_size = 19;
  double xi1_lo = 50.0;  // smallest grant considered for provider 1
  SolveOptions solve;
};

struct SweepResult {
  std::vector<std::array<double, 2>> grid;      // (xi_1, xi_2) per point
  std::vector<double> welfare;                  // NaN where the solve failed
  std::vector<EquilibriumResult> equilibria;
  int argmax_index = -1;
  std::array<double, 2> xi_star{0.0, 0.0};
};

/// Uniform grid over xi_1 in [xi1_lo, xi - xi1_lo] with xi_2 = xi - xi_1;
/// nonconverged points are recorded with NaN welfare and skipped by the
/// argmax.
inline SweepResult sweep(const MarketConfig& cfg, const SweepOptions& opts = {}) {
  if (opts.grid_size < 2) throw std::invalid_argument("sweep needs at least 2 grid points");
  const double hi = cfg.total_subsidy - opts.xi1_lo;
  if (!(opts.xi1_lo >= 0.0) || !(hi >= opts.xi1_lo))
    throw std::invalid_argument("sweep range is empty for this subsidy budget");

  SweepResult result;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < opts.grid_size; ++i) {
    const double xi1 =
        opts.xi1_lo + (hi - opts.xi1_lo) * static_cast<double>(i) /
                          static_cast<double>(opts.grid_size - 1);
    const double xi2 = cfg.total_subsidy - xi1;
    result.grid.push_back({xi1, xi2});

    const auto policy = GovernmentPolicy::linear({xi1, xi2});
    auto eq = solve_equilibrium(cfg, policy, opts.solve);
    double value = std::numeric_limits<double>::quiet_NaN();
    if (eq.converged) {
      value = social_welfare(eq.profile, cfg);
      if (value > best) {
        best = value;
        result.argmax_index = i;
        result.xi_star = {xi1, xi2};
      }
    }
    result.welfare.push_back(value);
    result.equilibria.push_back(std::move(eq));
  }
  if (result.argmax_index < 0)
    throw nonconvergence_error("subsidy sweep failed: no grid point converged",
                               std::numeric_limits<double>::quiet_NaN());
  return result;
}

}  // namespace specmkt

#endif  // SPECMKT_GOV_HPP
