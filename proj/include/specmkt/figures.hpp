#ifndef SPECMKT_FIGURES_HPP
#define SPECMKT_FIGURES_HPP

// Dataset builders behind the `figure` subcommand: each returns a plain
// table of the numerical equilibrium series next to its closed-form
// counterpart, ready for plotting by any external tool.

#include <optional>
#include <string>
#include <string_view>

#include "specmkt/best_response.hpp"
#include "specmkt/closed_form.hpp"
#include "specmkt/config.hpp"
#include "specmkt/csv.hpp"

namespace specmkt {

enum class FigureId { fig2, fig3a, fig3b, fig4, fig5a, fig5b, fig6a, fig6b, fig10 };

inline std::optional<FigureId> parse_figure_id(std::string_view name) {
  if (name == "fig2") return FigureId::fig2;
  if (name == "fig3a") return FigureId::fig3a;
  if (name == "fig3b") return FigureId::fig3b;
  if (name == "fig4") return FigureId::fig4;
  if (name == "fig5a") return FigureId::fig5a;
  if (name == "fig5b") return FigureId::fig5b;
  if (name == "fig6a") return FigureId::fig6a;
  if (name == "fig6b") return FigureId::fig6b;
  if (name == "fig10") return FigureId::fig10;
  return std::nullopt;
}

namespace detail {

/// xi_1 grid 50, 100, ..., xi - 50 (19 points for the standard budget).
inline std::vector<double> grant_grid(double total_subsidy) {
  std::vector<double> grid;
  const double lo = 50.0, hi = total_subsidy - 50.0;
  for (int i = 0; i < 19; ++i)
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) / 18.0);
  return grid;
}

/// Population grid 10, 50, 100, ..., 1000.
inline std::vector<int> population_grid() {
  std::vector<int> grid{10};
  for (int n = 50; n <= 1000; n += 50) grid.push_back(n);
  return grid;
}

inline std::vector<double> call_rate_grid() {
  std::vector<double> grid;
  for (int b = 30; b <= 200; b += 10) grid.push_back(static_cast<double>(b));
  return grid;
}

struct SeriesPoint {
  EquilibriumResult numeric;
  ClosedFormSolution approx;
  std::array<double, 2> approx_objectives{};
};

inline std::optional<SeriesPoint> solve_point(const MarketConfig& cfg,
                                              const std::vector<double>& grants,
                                              const SolveOptions& opts) {
  const auto policy = GovernmentPolicy::linear(grants);
  SeriesPoint point;
  point.numeric = solve_equilibrium(cfg, policy, opts);
  if (!point.numeric.converged) return std::nullopt;
  point.approx = solve_closed_form(cfg, policy);
  const StrategyProfile approx_profile{point.approx.spend,
                                       {point.approx.fees[0], point.approx.fees[1]}};
  point.approx_objectives = {provider_objective(0, approx_profile, policy, cfg),
                             provider_objective(1, approx_profile, policy, cfg)};
  return point;
}

inline void require_rows(const Table& table, const char* figure) {
  if (table.rows.empty())
    throw nonconvergence_error(std::string(figure) +
                                   ": no grid point converged, dataset is empty",
                               std::numeric_limits<double>::quiet_NaN());
}

inline Table trace_table(const ExperimentConfig& cfg, const SolveOptions& opts) {
  const auto eq = solve_equilibrium(cfg.market, cfg.policy(), opts);
  Table table;
  table.columns = {"iter", "s11", "s12", "s21", "s22", "f1", "f2", "obj1", "obj2"};
  for (std::size_t i = 0; i < eq.trace.size(); ++i) {
    const auto& entry = eq.trace[i];
    table.rows.push_back({static_cast<double>(i), entry.profile.spend(0, 0),
                          entry.profile.spend(0, 1), entry.profile.spend(1, 0),
                          entry.profile.spend(1, 1), entry.profile.fees[0],
                          entry.profile.fees[1], entry.objectives[0],
                          entry.objectives[1]});
  }
  if (!eq.converged)
    throw nonconvergence_error("fig2: equilibrium did not converge",
                               std::numeric_limits<double>::quiet_NaN());
  return table;
}

enum class GrantSweepKind { objectives, spends, fees, fee_branches };

inline Table grant_sweep_table(const ExperimentConfig& cfg, const SolveOptions& opts,
                               GrantSweepKind kind) {
  Table table;
  switch (kind) {
    case GrantSweepKind::objectives:
      table.columns = {"xi1", "xi2", "obj1", "obj2", "obj1_approx", "obj2_approx"};
      break;
    case GrantSweepKind::spends:
      table.columns = {"xi1", "xi2", "s11", "s12", "s21", "s22",
                       "s11_approx", "s12_approx", "s21_approx", "s22_approx"};
      break;
    case GrantSweepKind::fees:
      table.columns = {"xi1", "xi2", "f1", "f2", "f1_approx", "f2_approx"};
      break;
    case GrantSweepKind::fee_branches:
      table.columns = {"xi1", "f1_k0", "f1_k1", "f1_k2", "f1"};
      break;
  }
  for (const double xi1 : grant_grid(cfg.market.total_subsidy)) {
    const std::vector<double> grants{xi1, cfg.market.total_subsidy - xi1};
    const auto point = solve_point(cfg.market, grants, opts);
    if (!point) continue;
    const auto& profile = point->numeric.profile;
    switch (kind) {
      case GrantSweepKind::objectives:
        table.rows.push_back({xi1, grants[1], point->numeric.objectives[0],
                              point->numeric.objectives[1], point->approx_objectives[0],
                              point->approx_objectives[1]});
        break;
      case GrantSweepKind::spends:
        table.rows.push_back({xi1, grants[1], profile.spend(0, 0), profile.spend(0, 1),
                              profile.spend(1, 0), profile.spend(1, 1),
                              point->approx.spend(0, 0), point->approx.spend(0, 1),
                              point->approx.spend(1, 0), point->approx.spend(1, 1)});
        break;
      case GrantSweepKind::fees:
        table.rows.push_back({xi1, grants[1], profile.fees[0], profile.fees[1],
                              point->approx.fees[0], point->approx.fees[1]});
        break;
      case GrantSweepKind::fee_branches: {
        const auto branches =
            fee_branches(0, cfg.market, GovernmentPolicy::linear(grants));
        table.rows.push_back({xi1, branches[0], branches[1], branches[2],
                              profile.fees[0]});
        break;
      }
    }
  }
  require_rows(table, "grant sweep");
  return table;
}

enum class PopulationSweepKind { spends, fees };

inline Table population_sweep_table(const ExperimentConfig& cfg, const SolveOptions& opts,
                                    int varying_region, PopulationSweepKind kind) {
  Table table;
  const std::string axis = varying_region == 0 ? "n1" : "n2";
  if (kind == PopulationSweepKind::spends)
    table.columns = {axis, "s11", "s12", "s21", "s22",
                     "s11_approx", "s12_approx", "s21_approx", "s22_approx"};
  else
    table.columns = {axis, "f1", "f2", "f1_approx", "f2_approx"};
  for (const int n : population_grid()) {
    MarketConfig market = cfg.market;
    market.populations[static_cast<std::size_t>(varying_region)] = n;
    const auto point = solve_point(market, cfg.xi_split, opts);
    if (!point) continue;
    const auto& profile = point->numeric.profile;
    if (kind == PopulationSweepKind::spends)
      table.rows.push_back({static_cast<double>(n), profile.spend(0, 0),
                            profile.spend(0, 1), profile.spend(1, 0), profile.spend(1, 1),
                            point->approx.spend(0, 0), point->approx.spend(0, 1),
                            point->approx.spend(1, 0), point->approx.spend(1, 1)});
    else
      table.rows.push_back({static_cast<double>(n), profile.fees[0], profile.fees[1],
                            point->approx.fees[0], point->approx.fees[1]});
  }
  require_rows(table, "population sweep");
  return table;
}

inline Table call_rate_sweep_table(const ExperimentConfig& cfg, const SolveOptions& opts) {
  Table table;
  table.columns = {"beta", "f1", "f2", "f1_approx", "f2_approx"};
  for (const double beta : call_rate_grid()) {
    MarketConfig market = cfg.market;
    market.home_calls = beta;
    const auto point = solve_point(market, cfg.xi_split, opts);
    if (!point) continue;
    table.rows.push_back({beta, point->numeric.profile.fees[0],
                          point->numeric.profile.fees[1], point->approx.fees[0],
                          point->approx.fees[1]});
  }
  require_rows(table, "call-rate sweep");
  return table;
}

}  // namespace detail

inline Table build_figure(FigureId id, const ExperimentConfig& cfg,
                          const SolveOptions& opts) {
  using detail::GrantSweepKind;
  using detail::PopulationSweepKind;
  switch (id) {
    case FigureId::fig2:
      return detail::trace_table(cfg, opts);
    case FigureId::fig3a:
      return detail::grant_sweep_table(cfg, opts, GrantSweepKind::objectives);
    case FigureId::fig3b:
      return detail::grant_sweep_table(cfg, opts, GrantSweepKind::spends);
    case FigureId::fig4:
      return detail::population_sweep_table(cfg, opts, 0, PopulationSweepKind::spends);
    case FigureId::fig5a:
      return detail::grant_sweep_table(cfg, opts, GrantSweepKind::fees);
    case FigureId::fig5b:
      return detail::call_rate_sweep_table(cfg, opts);
    case FigureId::fig6a:
      return detail::population_sweep_table(cfg, opts, 0, PopulationSweepKind::fees);
    case FigureId::fig6b:
      return detail::population_sweep_table(cfg, opts, 1, PopulationSweepKind::fees);
    case FigureId::fig10:
      return detail::grant_sweep_table(cfg, opts, GrantSweepKind::fee_branches);
  }
  throw std::invalid_argument("unknown figure id");
}

}  // namespace specmkt

#endif  // SPECMKT_FIGURES_HPP
