#ifndef SPECMKT_CLI_HPP
#define SPECMKT_CLI_HPP

// Experiment-runner dispatch: one entry point mapping a parsed command spec
// to CSV files and process exit codes. Kept apart from argument parsing so
// tests can drive it directly.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>

#include "specmkt/config.hpp"
#include "specmkt/csv.hpp"
#include "specmkt/figures.hpp"
#include "specmkt/gov.hpp"

namespace specmkt {

enum class Command { evaluate, equilibrium, monte_carlo, closed_form, sweep, figure };

/// Exit codes: 0 success, 2 config error, 3 nonconvergence, 4 numeric-regime
/// error, 5 I/O error.
struct ExitCode {
  static constexpr int ok = 0;
  static constexpr int config = 2;
  static constexpr int nonconvergence = 3;
  static constexpr int regime = 4;
  static constexpr int io = 5;
};

struct ExperimentSpec {
  Command command = Command::evaluate;
  std::filesystem::path config_path;
  std::filesystem::path out_path = "-";
  std::uint64_t seed = 1;
  std::optional<double> epsilon;  // overrides the config when set
  int max_iter = 1000;
  std::optional<FigureId> figure;
  std::optional<long long> runs;  // monte-carlo run count / sweep grid size
};

namespace detail {

inline SolveOptions solve_options(const ExperimentSpec& spec, double config_epsilon) {
  SolveOptions opts;
  opts.epsilon = spec.epsilon.value_or(config_epsilon);
  opts.max_iter = spec.max_iter;
  return opts;
}

inline ExperimentConfig required_config(const ExperimentSpec& spec) {
  if (spec.config_path.empty())
    throw config_error("this command needs --config");
  return load_config(spec.config_path);
}

inline int run_evaluate(const ExperimentSpec& spec) {
  const auto cfg = required_config(spec);
  if (!cfg.strategy)
    throw config_error("evaluate needs keys 's' and 'f' in the config");
  const auto policy = cfg.policy();
  const auto J = static_cast<std::size_t>(cfg.market.provider_count);
  Table table;
  std::vector<double> row;
  for (std::size_t j = 0; j < J; ++j) {
    table.columns.push_back("obj" + std::to_string(j + 1));
    row.push_back(provider_objective(static_cast<int>(j), *cfg.strategy, policy,
                                     cfg.market));
  }
  for (std::size_t j = 0; j < J; ++j) {
    table.columns.push_back("oc" + std::to_string(j + 1));
    row.push_back(outside_calls_served(static_cast<int>(j), *cfg.strategy, cfg.market));
  }
  table.columns.push_back("welfare");
  row.push_back(social_welfare(*cfg.strategy, cfg.market));
  table.rows.push_back(std::move(row));
  write_csv(table, spec.out_path);
  return ExitCode::ok;
}

inline int run_equilibrium(const ExperimentSpec& spec) {
  const auto cfg = required_config(spec);
  const auto eq =
      solve_equilibrium(cfg.market, cfg.policy(), solve_options(spec, cfg.epsilon));
  Table table;
  table.columns = {"converged", "iterations", "s11", "s12", "s21", "s22",
                   "f1", "f2", "obj1", "obj2"};
  table.rows.push_back({eq.converged ? 1.0 : 0.0, static_cast<double>(eq.iterations),
                        eq.profile.spend(0, 0), eq.profile.spend(0, 1),
                        eq.profile.spend(1, 0), eq.profile.spend(1, 1), eq.profile.fees[0],
                        eq.profile.fees[1], eq.objectives[0], eq.objectives[1]});
  write_csv(table, spec.out_path);
  return eq.converged ? ExitCode::ok : ExitCode::nonconvergence;
}

inline int run_monte_carlo(const ExperimentSpec& spec) {
  SolveOptions opts;
  opts.epsilon = spec.epsilon.value_or(1e-3);
  opts.max_iter = spec.max_iter;
  const auto report = monte_carlo(McRanges{}, spec.runs.value_or(10000), spec.seed, opts);
  Table table;
  table.columns = {"runs", "le15", "b16_99", "ge100", "nonconverged", "seed"};
  table.rows.push_back({static_cast<double>(report.run_count),
                        static_cast<double>(report.within_15),
                        static_cast<double>(report.from_16_to_99),
                        static_cast<double>(report.at_least_100),
                        static_cast<double>(report.nonconverged),
                        static_cast<double>(report.seed)});
  write_csv(table, spec.out_path);
  return ExitCode::ok;
}

inline int run_closed_form(const ExperimentSpec& spec) {
  const auto cfg = required_config(spec);
  const auto sol = solve_closed_form(cfg.market, cfg.policy());
  Table table;
  table.columns = {"s11", "s12", "s21", "s22", "f1", "f2",
                   "a", "b", "c", "d", "s1_star", "s2_star",
                   "f1_clamped", "f2_clamped"};
  table.rows.push_back({sol.spend(0, 0), sol.spend(0, 1), sol.spend(1, 0), sol.spend(1, 1),
                        sol.fees[0], sol.fees[1], sol.coeff_a, sol.coeff_b, sol.coeff_c,
                        sol.coeff_d, sol.s1_star, sol.s2_star,
                        sol.fee_clamped[0] ? 1.0 : 0.0, sol.fee_clamped[1] ? 1.0 : 0.0});
  write_csv(table, spec.out_path);
  return ExitCode::ok;
}

inline int run_sweep(const ExperimentSpec& spec) {
  const auto cfg = required_config(spec);
  SweepOptions opts;
  opts.solve = solve_options(spec, cfg.epsilon);
  if (spec.runs) opts.grid_size = static_cast<int>(*spec.runs);
  const auto result = sweep(cfg.market, opts);
  Table table;
  table.columns = {"xi1", "xi2", "welfare", "s11", "s12", "s21", "s22",
                   "f1", "f2", "obj1", "obj2", "iterations", "is_argmax"};
  for (std::size_t i = 0; i < result.grid.size(); ++i) {
    const auto& eq = result.equilibria[i];
    if (!eq.converged) continue;
    table.rows.push_back({result.grid[i][0], result.grid[i][1], result.welfare[i],
                          eq.profile.spend(0, 0), eq.profile.spend(0, 1),
                          eq.profile.spend(1, 0), eq.profile.spend(1, 1),
                          eq.profile.fees[0], eq.profile.fees[1], eq.objectives[0],
                          eq.objectives[1], static_cast<double>(eq.iterations),
                          static_cast<int>(i) == result.argmax_index ? 1.0 : 0.0});
  }
  write_csv(table, spec.out_path);
  return ExitCode::ok;
}

inline int run_figure(const ExperimentSpec& spec) {
  if (!spec.figure) throw config_error("figure command needs --figure ID");
  const auto cfg = required_config(spec);
  const auto table = build_figure(*spec.figure, cfg, solve_options(spec, cfg.epsilon));
  write_csv(table, spec.out_path);
  return ExitCode::ok;
}

}  // namespace detail

/// Dispatch a command spec; prints diagnostics to stderr and returns the
/// process exit code.
inline int run(const ExperimentSpec& spec) {
  try {
    if (spec.figure && spec.command != Command::figure)
      throw config_error("--figure is valid only with the figure command");
    switch (spec.command) {
      case Command::evaluate: return detail::run_evaluate(spec);
      case Command::equilibrium: return detail::run_equilibrium(spec);
      case Command::monte_carlo: return detail::run_monte_carlo(spec);
      case Command::closed_form: return detail::run_closed_form(spec);
      case Command::sweep: return detail::run_sweep(spec);
      case Command::figure: return detail::run_figure(spec);
    }
    throw std::invalid_argument("unknown command");
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ExitCode::config;
  } catch (const budget_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ExitCode::config;
  } catch (const nonconvergence_error& e) {
    std::cerr << "nonconvergence: " << e.what() << '\n';
    return ExitCode::nonconvergence;
  } catch (const regime_error& e) {
    std::cerr << "numeric regime error: " << e.what() << '\n';
    return ExitCode::regime;
  } catch (const singular_domain_error& e) {
    std::cerr << "numeric regime error: " << e.what() << '\n';
    return ExitCode::regime;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return ExitCode::io;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ExitCode::config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace specmkt

#endif  // SPECMKT_CLI_HPP
