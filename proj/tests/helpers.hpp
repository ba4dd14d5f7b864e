#ifndef SPECMKT_TESTS_HELPERS_HPP
#define SPECMKT_TESTS_HELPERS_HPP

// Shared fixtures and independent oracles for the test suites. Everything
// here stays deliberately separate from the library's own solution paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "specmkt/market.hpp"

namespace testutil {

inline specmkt::MarketConfig market(int n1, int n2, double beta, double gamma = 0.05,
                                    double alpha = 1.0, double xi = 1000.0) {
  specmkt::MarketConfig cfg;
  cfg.region_count = 2;
  cfg.provider_count = 2;
  cfg.populations = {n1, n2};
  cfg.home_calls = beta;
  cfg.outside_calls = alpha;
  cfg.utility_scale = gamma;
  cfg.total_subsidy = xi;
  return cfg;
}

// the convergence-demo instance
inline specmkt::MarketConfig demo_market() { return market(26, 744, 76.0); }

// the closed-form baseline instance
inline specmkt::MarketConfig baseline_market() { return market(40, 80, 30.0); }

inline specmkt::StrategyProfile profile(double s11, double s12, double s21, double s22,
                                        double f1, double f2) {
  specmkt::StrategyProfile p{specmkt::Matrix(2, 2), {f1, f2}};
  p.spend(0, 0) = s11;
  p.spend(0, 1) = s12;
  p.spend(1, 0) = s21;
  p.spend(1, 1) = s22;
  return p;
}

/// Central difference with a fixed step.
inline double central_difference(const std::function<double(double)>& fn, double x,
                                 double h) {
  return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

/// Independent cubic-root oracle for t^3 - a t - b: sign scan over a Cauchy
/// bound followed by bisection. Assumes three real roots (possibly close).
inline std::vector<double> bisect_cubic_roots(double a, double b) {
  const auto poly = [&](double t) { return t * t * t - a * t - b; };
  const double bound = 1.0 + std::max(std::abs(a), std::abs(b));
  const int samples = 20000;
  std::vector<double> roots;
  double prev_t = -bound;
  double prev_v = poly(prev_t);
  for (int i = 1; i <= samples; ++i) {
    const double t = -bound + 2.0 * bound * i / samples;
    const double v = poly(t);
    if (v == 0.0) {
      roots.push_back(t);
    } else if (prev_v != 0.0 && ((prev_v < 0.0) != (v < 0.0))) {
      double lo = prev_t, hi = t;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((poly(lo) < 0.0) != (poly(mid) < 0.0))
          hi = mid;
        else
          lo = mid;
        if (hi - lo < 1e-14 * bound) break;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_t = t;
    prev_v = v;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Best value of the clamped objective over the budget face, scanned on an
/// n_s-by-n_f grid; the brute-force side of the dominance and epsilon-Nash
/// checks.
inline double face_grid_best(int provider, const specmkt::StrategyProfile& at,
                             const specmkt::GovernmentPolicy& policy,
                             const specmkt::MarketConfig& cfg, int n_s, int n_f) {
  const auto j = static_cast<std::size_t>(provider);
  const double budget = cfg.cash(provider) + policy.grants[j];
  const double fee_hi =
      cfg.utility_scale * cfg.home_calls * std::sqrt(budget);
  specmkt::StrategyProfile probe = at;
  double best = -1e300;
  for (int a = 1; a < n_s; ++a) {
    const double s1 = budget * a / n_s;
    probe.spend(j, 0) = s1;
    probe.spend(j, 1) = budget - s1;
    for (int b = 1; b < n_f; ++b) {
      probe.fees[j] = fee_hi * b / n_f;
      best = std::max(best, provider_objective(provider, probe, policy, cfg));
    }
  }
  return best;
}

}  // namespace testutil

#endif  // SPECMKT_TESTS_HELPERS_HPP
