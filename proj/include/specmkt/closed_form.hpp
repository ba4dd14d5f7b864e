#ifndef SPECMKT_CLOSED_FORM_HPP
#define SPECMKT_CLOSED_FORM_HPP

// Closed-form approximations for the two-provider/two-region game: the
// population-weighted subsidy split and the optimum fees obtained from a
// depressed cubic solved with Viete's trigonometric formula.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "specmkt/errors.hpp"
#include "specmkt/market.hpp"

namespace specmkt {

/// Coefficients of the two depressed cubics t^3 - a t - b = 0 whose roots
/// yield the optimum fees: (a, b) belongs to provider 1, (c, d) to
/// provider 2.
struct CubicCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

/// Approximate optimum spend split: provider j puts
/// (grant/2) * (n_k / (n_1 + n_2) + 1/2) into region k. Row sums equal the
/// grants exactly.
inline Matrix subsidy_split(const MarketConfig& cfg, const GovernmentPolicy& policy) {
  if (cfg.region_count != 2 || cfg.provider_count != 2)
    throw std::invalid_argument("closed forms exist only for the 2-provider/2-region game");
  const double n1 = static_cast<double>(cfg.populations[0]);
  const double n2 = static_cast<double>(cfg.populations[1]);
  const double w1 = n1 / (n1 + n2) + 0.5;
  Matrix split(2, 2);
  for (std::size_t j = 0; j < 2; ++j) {
    split(j, 0) = policy.grants[j] / 2.0 * w1;
    // the two weights sum to 2, so the remainder keeps the row sum exact
    split(j, 1) = policy.grants[j] - split(j, 0);
  }
  return split;
}

inline CubicCoefficients cubic_coefficients(double s1_star, double s2_star,
                                            const MarketConfig& cfg) {
  const double gb = cfg.utility_scale * cfg.home_calls;  // gamma * beta
  const double r1 = std::sqrt(s1_star);
  const double r2 = std::sqrt(s2_star);
  CubicCoefficients co;
  co.a = 4.0 * gb * gb * (9.0 * r1 * r2 + (r1 - 2.0 * r2) * (r1 - 2.0 * r2)) / 27.0;
  co.b = gb * gb * gb *
         (16.0 * s1_star * r1 - 240.0 * s2_star * r1 - 123.0 * s1_star * r2 -
          128.0 * s2_star * r2) /
         729.0;
  co.c = 4.0 * gb * gb * (9.0 * r2 * r1 + (r2 - 2.0 * r1) * (r2 - 2.0 * r1)) / 27.0;
  co.d = gb * gb * gb *
         (16.0 * s2_star * r2 - 240.0 * s1_star * r2 - 123.0 * s2_star * r1 -
          128.0 * s1_star * r1) /
         729.0;
  return co;
}

/// Three real roots of t^3 - a t - b = 0 in branch order k = 0, 1, 2.
/// The ordering matches the fee-branch labels: for b <= 0 it reproduces
/// 2*sqrt(a/3)*cos(acos(sqrt(27 b^2 / 4 a^3))/3 + (3 - 2k)*pi/3) exactly, and
/// for b > 0 it keeps the roots sign-correct rather than mirrored.
inline std::array<double, 3> viete_roots(double a, double b) {
  if (!(a > 0.0))
    throw regime_error("depressed cubic has no three-real-root form: a = " +
                       std::to_string(a) + " is not positive");
  const double q = 27.0 * b * b / (4.0 * a * a * a);
  if (q > 1.0 + 1e-12)
    throw regime_error("depressed cubic left the three-real-root regime: 27 b^2 / (4 a^3) = " +
                       std::to_string(q));
  const double magnitude = std::sqrt(std::min(q, 1.0));
  const double phi = std::acos(b < 0.0 ? -magnitude : magnitude);
  const double radius = 2.0 * std::sqrt(a / 3.0);
  const double third = 2.0 * std::numbers::pi / 3.0;
  return {radius * std::cos(phi / 3.0 - 2.0 * third),
          radius * std::cos(phi / 3.0 - third),
          radius * std::cos(phi / 3.0)};
}

/// The same three roots sorted ascending; handy for comparisons against an
/// independent root finder.
inline std::array<double, 3> viete_roots_sorted(double a, double b) {
  auto roots = viete_roots(a, b);
  std::sort(roots.begin(), roots.end());
  return roots;
}

namespace detail {

/// All three fee branches f = gamma*beta*(7 sqrt(s_own) + 4 sqrt(s_opp))/9 - t_k
/// for one provider's cubic, unclamped.
inline std::array<double, 3> fee_branches_from(double s_own, double s_opp, double cube_a,
                                               double cube_b, const MarketConfig& cfg) {
  const double gb = cfg.utility_scale * cfg.home_calls;
  const double shift = gb * (7.0 * std::sqrt(s_own) + 4.0 * std::sqrt(s_opp)) / 9.0;
  const auto roots = viete_roots(cube_a, cube_b);
  return {shift - roots[0], shift - roots[1], shift - roots[2]};
}

}  // namespace detail

/// Raw fee branches k = 0, 1, 2 for one provider (0 or 1); branch k = 1 is
/// the one that tracks the numerical equilibrium.
inline std::array<double, 3> fee_branches(int provider, const MarketConfig& cfg,
                                          const GovernmentPolicy& policy) {
  const double s1 = policy.grants[0] / 2.0;
  const double s2 = policy.grants[1] / 2.0;
  const auto co = cubic_coefficients(s1, s2, cfg);
  return provider == 0 ? detail::fee_branches_from(s1, s2, co.a, co.b, cfg)
                       : detail::fee_branches_from(s2, s1, co.c, co.d, cfg);
}

/// Optimum fees from the k = 1 branch, clamped at zero. Clamp flags are
/// reported through solve_closed_form.
inline std::array<double, 2> optimum_fees(const MarketConfig& cfg,
                                          const GovernmentPolicy& policy) {
  const auto f1 = fee_branches(0, cfg, policy)[1];
  const auto f2 = fee_branches(1, cfg, policy)[1];
  return {std::max(f1, 0.0), std::max(f2, 0.0)};
}

/// Full closed-form package: spend split, fees, cubic coefficients, and the
/// equal-split spends the fee derivation assumes.
inline ClosedFormSolution solve_closed_form(const MarketConfig& cfg,
                                            const GovernmentPolicy& policy) {
  ClosedFormSolution sol;
  sol.spend = subsidy_split(cfg, policy);
  sol.s1_star = policy.grants[0] / 2.0;
  sol.s2_star = policy.grants[1] / 2.0;
  const auto co = cubic_coefficients(sol.s1_star, sol.s2_star, cfg);
  sol.coeff_a = co.a;
  sol.coeff_b = co.b;
  sol.coeff_c = co.c;
  sol.coeff_d = co.d;
  const double raw1 = fee_branches(0, cfg, policy)[1];
  const double raw2 = fee_branches(1, cfg, policy)[1];
  sol.fee_clamped = {raw1 < 0.0, raw2 < 0.0};
  sol.fees = {std::max(raw1, 0.0), std::max(raw2, 0.0)};
  return sol;
}

}  // namespace specmkt

#endif  // SPECMKT_CLOSED_FORM_HPP
