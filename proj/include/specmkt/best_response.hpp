#ifndef SPECMKT_BEST_RESPONSE_HPP
#define SPECMKT_BEST_RESPONSE_HPP

// Fixed-point loop alternating the two providers' best responses until both
// objective values settle, plus the Monte-Carlo harness that collects
// convergence statistics over random market instances.

#include <cstdint>
#include <optional>
#include <vector>

#include "specmkt/foc.hpp"
#include "specmkt/market.hpp"

namespace specmkt {

struct SolveOptions {
  double epsilon = 1e-3;  // threshold on per-provider objective deltas
  int max_iter = 1000;
  double foc_tol = 1e-8;
};

namespace detail {

inline EquilibriumResult equilibrium_pass(const MarketConfig& cfg,
                                          const GovernmentPolicy& policy,
                                          const SolveOptions& opts, bool prefer_regime) {
  EquilibriumResult result;
  result.profile = StrategyProfile::zeros(cfg);
  result.objectives = {provider_objective(0, result.profile, policy, cfg),
                       provider_objective(1, result.profile, policy, cfg)};
  result.trace.push_back({result.profile, result.objectives});

  std::array<std::optional<ProviderVars>, 2> warm;
  std::vector<double> previous = result.objectives;

  for (int iteration = 1; iteration <= opts.max_iter; ++iteration) {
    bool all_roots = true;
    try {
      for (int j = 0; j < 2; ++j) {
        const auto o = static_cast<std::size_t>(1 - j);
        const OpponentVars opp{result.profile.spend(o, 0), result.profile.spend(o, 1),
                               result.profile.fees[o]};
        BestResponseOptions br;
        br.tol = opts.foc_tol;
        br.warm_start = warm[static_cast<std::size_t>(j)];
        br.prefer_regime = prefer_regime;
        const auto response = best_response_provider(j, opp, policy, cfg, br);
        const auto jj = static_cast<std::size_t>(j);
        result.profile.spend(jj, 0) = response.vars.s1;
        result.profile.spend(jj, 1) = response.vars.s2;
        result.profile.fees[jj] = response.vars.fee;
        warm[jj] = response.vars;
        all_roots = all_roots && response.foc_root;
      }
    } catch (const nonconvergence_error&) {
      result.converged = false;
      result.iterations = static_cast<int>(result.trace.size()) - 1;
      return result;
    }

    result.objectives = {provider_objective(0, result.profile, policy, cfg),
                         provider_objective(1, result.profile, policy, cfg)};
    result.trace.push_back({result.profile, result.objectives});
    result.iterations = iteration;

    if (std::abs(result.objectives[0] - previous[0]) < opts.epsilon &&
        std::abs(result.objectives[1] - previous[1]) < opts.epsilon) {
      // A regime-preferred pass must settle on genuine stationarity roots;
      // a standstill on bridge points is handed to the unrestricted pass.
      result.converged = !prefer_regime || all_roots;
      return result;
    }
    previous = result.objectives;
  }
  result.converged = false;
  return result;
}

}  // namespace detail

/// Alternate best responses from the all-zero start until both providers'
/// objective values change by less than epsilon. Solves on the branch with
/// well-defined contest shares first; a game with no rest point there is
/// re-solved with unrestricted branch selection. Never throws on
/// nonconvergence; the result carries converged = false instead.
inline EquilibriumResult solve_equilibrium(const MarketConfig& cfg,
                                           const GovernmentPolicy& policy,
                                           const SolveOptions& opts = {}) {
  if (cfg.region_count != 2 || cfg.provider_count != 2)
    throw std::invalid_argument("equilibrium solve supports only the 2x2 game");
  if (!(opts.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");

  auto result = detail::equilibrium_pass(cfg, policy, opts, true);
  if (!result.converged) result = detail::equilibrium_pass(cfg, policy, opts, false);
  return result;
}

/// Uniform-integer ranges for random market instances; grants are drawn as
/// xi_1 with xi_2 = total - xi_1.
struct McRanges {
  int xi1_lo = 50;
  int xi1_hi = 950;
  int beta_lo = 30;
  int beta_hi = 200;
  int n_lo = 20;
  int n_hi = 1000;
  double total_subsidy = 1000.0;
  double gamma = 0.05;
  double alpha = 1.0;
};

struct MonteCarloReport {
  long long run_count = 0;
  long long within_15 = 0;
  long long from_16_to_99 = 0;
  long long at_least_100 = 0;
  long long nonconverged = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline int draw_uniform(std::uint64_t& state, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(splitmix64(state) % span);
}

}  // namespace detail

/// Solve `runs` random instances and bucket their iteration counts.
/// Deterministic for a given seed; per-run streams are derived from
/// (seed, run index) so instances are order-independent.
inline MonteCarloReport monte_carlo(const McRanges& ranges, long long runs,
                                    std::uint64_t seed, const SolveOptions& opts = {}) {
  if (runs <= 0) throw std::invalid_argument("monte carlo needs a positive run count");
  if (ranges.xi1_lo > ranges.xi1_hi || ranges.beta_lo > ranges.beta_hi ||
      ranges.n_lo > ranges.n_hi)
    throw std::invalid_argument("monte carlo ranges are empty");
  if (ranges.xi1_lo < 0 || ranges.xi1_hi > static_cast<int>(ranges.total_subsidy))
    throw std::invalid_argument("grant range exceeds the subsidy budget");

  MonteCarloReport report;
  report.run_count = runs;
  report.seed = seed;

  for (long long run = 0; run < runs; ++run) {
    std::uint64_t state = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(run + 1);
    const int xi1 = detail::draw_uniform(state, ranges.xi1_lo, ranges.xi1_hi);
    const int beta = detail::draw_uniform(state, ranges.beta_lo, ranges.beta_hi);
    const int n1 = detail::draw_uniform(state, ranges.n_lo, ranges.n_hi);
    const int n2 = detail::draw_uniform(state, ranges.n_lo, ranges.n_hi);

    MarketConfig cfg;
    cfg.region_count = 2;
    cfg.provider_count = 2;
    cfg.populations = {n1, n2};
    cfg.home_calls = static_cast<double>(beta);
    cfg.outside_calls = ranges.alpha;
    cfg.utility_scale = ranges.gamma;
    cfg.total_subsidy = ranges.total_subsidy;
    const auto policy = GovernmentPolicy::linear(
        {static_cast<double>(xi1), ranges.total_subsidy - static_cast<double>(xi1)});

    const auto eq = solve_equilibrium(cfg, policy, opts);
    if (!eq.converged)
      ++report.nonconverged;
    else if (eq.iterations <= 15)
      ++report.within_15;
    else if (eq.iterations <= 99)
      ++report.from_16_to_99;
    else
      ++report.at_least_100;
  }
  return report;
}

}  // namespace specmkt

#endif  // SPECMKT_BEST_RESPONSE_HPP
