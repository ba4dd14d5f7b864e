#ifndef SPECMKT_MARKET_HPP
#define SPECMKT_MARKET_HPP

// Subsidized spectrum-market model: customer choice, provider revenue and
// outside-call reward, and the government's social-welfare objective.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "specmkt/errors.hpp"
#include "specmkt/matrix.hpp"

namespace specmkt {

/// Exogenous market description: regions, populations, call rates, the
/// customers' utility scaling, provider cash, and the government's total
/// subsidy budget.
struct MarketConfig {
  int region_count = 2;              // K
  int provider_count = 2;            // J
  std::vector<int> populations;      // n_k, customers per region
  double home_calls = 30.0;          // beta, calls a customer makes at home
  double outside_calls = 1.0;        // alpha, calls a customer makes away
  double utility_scale = 0.05;       // gamma in u(x) = gamma * sqrt(x)
  std::vector<double> initial_cash;  // E_j, empty means all zero
  double total_subsidy = 0.0;        // xi, the government's budget

  int total_customers() const {
    return std::accumulate(populations.begin(), populations.end(), 0);
  }
  double cash(int provider) const {
    return initial_cash.empty() ? 0.0 : initial_cash[static_cast<std::size_t>(provider)];
  }
};

void validate(const MarketConfig& cfg);

/// The government's stage-one move: per-provider grants plus either the
/// implied linear per-outside-call reward or an explicit penalty function
/// p(OC) giving the returned proportion of the grant.
struct GovernmentPolicy {
  std::vector<double> grants;             // xi_j
  std::function<double(double)> penalty;  // empty => linear reward mode

  bool linear_mode() const { return !penalty; }

  /// Per-outside-call reward delta = xi / (alpha * I); linear mode only.
  double reward_rate(const MarketConfig& cfg) const {
    if (!linear_mode())
      throw std::logic_error("reward_rate is defined only for the linear policy");
    const double denom = cfg.outside_calls * cfg.total_customers();
    if (denom <= 0.0)
      throw singular_domain_error("per-outside-call reward undefined: alpha * I is zero");
    return cfg.total_subsidy / denom;
  }

  static GovernmentPolicy linear(std::vector<double> grants) {
    return GovernmentPolicy{std::move(grants), nullptr};
  }
};

void validate(const GovernmentPolicy& policy, const MarketConfig& cfg);

/// One joint strategy: every provider's regional spend and its flat fee.
struct StrategyProfile {
  Matrix spend;              // J x K
  std::vector<double> fees;  // J

  static StrategyProfile zeros(const MarketConfig& cfg) {
    return StrategyProfile{
        Matrix(static_cast<std::size_t>(cfg.provider_count),
               static_cast<std::size_t>(cfg.region_count)),
        std::vector<double>(static_cast<std::size_t>(cfg.provider_count), 0.0)};
  }

  /// Budget feasibility: total spend within cash plus grant.
  bool feasible(int provider, const GovernmentPolicy& policy, const MarketConfig& cfg,
                double tol = 1e-9) const {
    const auto j = static_cast<std::size_t>(provider);
    const double budget = cfg.cash(provider) + policy.grants[j];
    return spend.row_sum(j) <= budget + tol * std::max(1.0, budget);
  }

  friend bool operator==(const StrategyProfile& a, const StrategyProfile& b) {
    return a.spend == b.spend && a.fees == b.fees;
  }
};

struct TraceEntry {
  StrategyProfile profile;
  std::vector<double> objectives;
};

struct EquilibriumResult {
  StrategyProfile profile;
  std::vector<double> objectives;
  int iterations = 0;
  bool converged = false;
  std::vector<TraceEntry> trace;
};

/// Closed-form approximate equilibrium for the two-provider/two-region game:
/// population-weighted spend split, cubic-derived fees, and the cubic
/// coefficients that produced them.
struct ClosedFormSolution {
  Matrix spend;                 // 2x2 split of each grant across regions
  std::array<double, 2> fees{}; // k=1 branch, clamped at zero
  std::array<bool, 2> fee_clamped{false, false};
  double coeff_a = 0.0;         // depressed-cubic coefficients for f1 ...
  double coeff_b = 0.0;
  double coeff_c = 0.0;         // ... and for f2
  double coeff_d = 0.0;
  double s1_star = 0.0;         // xi_1 / 2
  double s2_star = 0.0;         // xi_2 / 2
};

/// Utility a customer gets from a provider with service intensity `psi`
/// charging `fee`: beta * gamma * sqrt(psi) - fee. May be negative.
inline double customer_utility(double psi, double fee, const MarketConfig& cfg) {
  return cfg.home_calls * cfg.utility_scale * std::sqrt(psi) - fee;
}

namespace detail {

/// Nonnegative shares proportional to `weights` clamped at zero; uniform
/// fallback when every weight is nonpositive.
inline std::vector<double> clamped_shares(const std::vector<double>& weights) {
  std::vector<double> out(weights.size(), 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    out[j] = std::max(weights[j], 0.0);
    total += out[j];
  }
  if (total <= 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(weights.size()));
    return out;
  }
  for (double& v : out) v /= total;
  return out;
}

/// Share of region-k service intensity held by each provider, measured in
/// customer utility units u(psi); uniform when no provider offers service.
inline std::vector<double> intensity_shares(int region, const StrategyProfile& profile,
                                            const MarketConfig& cfg) {
  const auto k = static_cast<std::size_t>(region);
  std::vector<double> u(profile.spend.rows(), 0.0);
  for (std::size_t j = 0; j < profile.spend.rows(); ++j)
    u[j] = cfg.utility_scale * std::sqrt(profile.spend(j, k));
  return clamped_shares(u);
}

/// Sum over source regions of the region-k outside-call weight
/// n_khat * n_k / (I - n_khat); multiplying by alpha gives the calls landing
/// in region k.
inline double inbound_flow_weight(int region, const MarketConfig& cfg) {
  const int total = cfg.total_customers();
  const auto k = static_cast<std::size_t>(region);
  double w = 0.0;
  for (std::size_t khat = 0; khat < cfg.populations.size(); ++khat) {
    if (khat == k) continue;
    const double complement = static_cast<double>(total - cfg.populations[khat]);
    w += static_cast<double>(cfg.populations[khat]) *
         static_cast<double>(cfg.populations[k]) / complement;
  }
  return w;
}

}  // namespace detail

/// Probability that a region-k customer subscribes to each provider,
/// proportional to the positive part of its offered utility; uniform when
/// nobody offers positive utility.
inline std::vector<double> choice_probabilities(int region, const StrategyProfile& profile,
                                                const MarketConfig& cfg) {
  const auto k = static_cast<std::size_t>(region);
  std::vector<double> utility(profile.spend.rows(), 0.0);
  for (std::size_t j = 0; j < profile.spend.rows(); ++j)
    utility[j] = customer_utility(profile.spend(j, k), profile.fees[j], cfg);
  return detail::clamped_shares(utility);
}

/// K-by-K matrix of outside calls: entry (khat, k) is how many calls from
/// region-khat residents land in region k; rows sum to alpha * n_khat.
inline Matrix outside_call_flows(const MarketConfig& cfg) {
  const auto K = static_cast<std::size_t>(cfg.region_count);
  Matrix flows(K, K, 0.0);
  if (cfg.outside_calls == 0.0) return flows;
  const int total = cfg.total_customers();
  for (std::size_t khat = 0; khat < K; ++khat) {
    const double complement = static_cast<double>(total - cfg.populations[khat]);
    if (complement <= 0.0)
      throw singular_domain_error(
          "outside calls from region " + std::to_string(khat + 1) +
          " have nowhere to go: complement population is zero while alpha > 0");
    for (std::size_t k = 0; k < K; ++k) {
      if (k == khat) continue;
      flows(khat, k) = cfg.outside_calls * static_cast<double>(cfg.populations[khat]) *
                       static_cast<double>(cfg.populations[k]) / complement;
    }
  }
  return flows;
}

/// Outside calls provider j serves across all regions, splitting each
/// region's inbound calls by intensity share.
inline double outside_calls_served(int provider, const StrategyProfile& profile,
                                   const MarketConfig& cfg) {
  const Matrix flows = outside_call_flows(cfg);
  const auto j = static_cast<std::size_t>(provider);
  double served = 0.0;
  for (int k = 0; k < cfg.region_count; ++k) {
    const auto shares = detail::intensity_shares(k, profile, cfg);
    double inbound = 0.0;
    for (std::size_t khat = 0; khat < flows.rows(); ++khat)
      inbound += flows(khat, static_cast<std::size_t>(k));
    served += inbound * shares[j];
  }
  return served;
}

/// Provider j's simplified objective: fee revenue, plus the linear
/// outside-call reward at rate xi / I, minus total regional spend. The
/// outside-call rate alpha cancels against the reward rate and never enters.
inline double provider_objective(int provider, const StrategyProfile& profile,
                                 const GovernmentPolicy& policy, const MarketConfig& cfg) {
  const auto j = static_cast<std::size_t>(provider);
  if (!profile.feasible(provider, policy, cfg)) {
    throw budget_error(provider, profile.spend.row_sum(j),
                       cfg.cash(provider) + policy.grants[j]);
  }
  const double total = static_cast<double>(cfg.total_customers());
  double revenue = 0.0;
  double reward = 0.0;
  double spent = 0.0;
  for (int k = 0; k < cfg.region_count; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const auto probs = choice_probabilities(k, profile, cfg);
    revenue += profile.fees[j] * static_cast<double>(cfg.populations[kk]) * probs[j];
    const auto shares = detail::intensity_shares(k, profile, cfg);
    reward += detail::inbound_flow_weight(k, cfg) * shares[j];
    spent += profile.spend(j, kk);
  }
  reward *= cfg.total_subsidy / total;
  return revenue + reward - spent;
}

/// General-model hooks: a two-argument intensity function Q(s, b), an
/// arbitrary penalty p(OC) in [0, 1], and optional per-provider bandwidth
/// allocations with their grants.
struct GeneralModel {
  std::function<double(double, double)> intensity;  // psi = Q(spend, bandwidth)
  std::function<double(double)> penalty;            // proportion of grant returned
  Matrix bandwidth;                                 // J x K; empty means all zero
  std::vector<double> bandwidth_grants;             // B_j; empty means unchecked
};

/// Provider j's objective in the general model: revenue + (1 - p(OC_j)) *
/// grant - spend, with intensities from Q. Evaluation only; nothing is
/// solved over bandwidth.
inline double general_provider_objective(int provider, const StrategyProfile& profile,
                                         const GeneralModel& model,
                                         const GovernmentPolicy& policy,
                                         const MarketConfig& cfg) {
  const auto j = static_cast<std::size_t>(provider);
  const auto J = profile.spend.rows();
  const auto K = profile.spend.cols();

  const auto bandwidth_at = [&](std::size_t jj, std::size_t kk) {
    return model.bandwidth.empty() ? 0.0 : model.bandwidth(jj, kk);
  };
  if (!model.bandwidth_grants.empty()) {
    double allocated = 0.0;
    for (std::size_t kk = 0; kk < K; ++kk) allocated += bandwidth_at(j, kk);
    const double grant = model.bandwidth_grants[j];
    if (std::abs(allocated - grant) > 1e-9 * std::max(1.0, std::abs(grant)))
      throw std::invalid_argument("provider " + std::to_string(provider + 1) +
                                  " allocates bandwidth " + std::to_string(allocated) +
                                  " but was granted " + std::to_string(grant));
  }

  Matrix psi(J, K);
  for (std::size_t jj = 0; jj < J; ++jj)
    for (std::size_t kk = 0; kk < K; ++kk)
      psi(jj, kk) = model.intensity(profile.spend(jj, kk), bandwidth_at(jj, kk));

  const Matrix flows = outside_call_flows(cfg);
  double revenue = 0.0;
  double served = 0.0;
  double spent = 0.0;
  for (std::size_t kk = 0; kk < K; ++kk) {
    std::vector<double> utility(J, 0.0);
    std::vector<double> u(J, 0.0);
    for (std::size_t jj = 0; jj < J; ++jj) {
      u[jj] = cfg.utility_scale * std::sqrt(psi(jj, kk));
      utility[jj] = cfg.home_calls * u[jj] - profile.fees[jj];
    }
    const auto probs = detail::clamped_shares(utility);
    revenue += profile.fees[j] * static_cast<double>(cfg.populations[kk]) * probs[j];
    const auto shares = detail::clamped_shares(u);
    double inbound = 0.0;
    for (std::size_t khat = 0; khat < flows.rows(); ++khat) inbound += flows(khat, kk);
    served += inbound * shares[j];
    spent += profile.spend(j, kk);
  }

  const double returned = model.penalty(served);
  if (returned < -1e-12 || returned > 1.0 + 1e-12)
    throw std::invalid_argument("penalty function returned " + std::to_string(returned) +
                                " outside [0, 1]");
  return revenue + (1.0 - returned) * policy.grants[j] - spent;
}

/// Government objective: expected home-call utility under the subscription
/// probabilities, plus outside-call utility weighted by intensity share.
inline double social_welfare(const StrategyProfile& profile, const MarketConfig& cfg) {
  const auto J = profile.spend.rows();
  const Matrix flows = outside_call_flows(cfg);
  double welfare = 0.0;
  for (int k = 0; k < cfg.region_count; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    std::vector<double> u(J, 0.0);
    for (std::size_t j = 0; j < J; ++j)
      u[j] = cfg.utility_scale * std::sqrt(profile.spend(j, kk));

    const auto probs = choice_probabilities(k, profile, cfg);
    for (std::size_t j = 0; j < J; ++j)
      welfare += static_cast<double>(cfg.populations[kk]) * probs[j] * cfg.home_calls * u[j];

    double inbound = 0.0;
    for (std::size_t khat = 0; khat < flows.rows(); ++khat) inbound += flows(khat, kk);
    const auto shares = detail::clamped_shares(u);
    for (std::size_t j = 0; j < J; ++j) welfare += inbound * shares[j] * u[j];
  }
  return welfare;
}

inline void validate(const MarketConfig& cfg) {
  if (cfg.region_count < 1) throw config_error("region count must be at least 1");
  if (cfg.provider_count < 1) throw config_error("provider count must be at least 1");
  if (cfg.populations.size() != static_cast<std::size_t>(cfg.region_count))
    throw config_error("expected one population per region");
  for (std::size_t k = 0; k < cfg.populations.size(); ++k)
    if (cfg.populations[k] < 1)
      throw config_error("population of region " + std::to_string(k + 1) +
                         " must be a positive integer");
  if (!(cfg.home_calls > 0.0)) throw config_error("beta must be positive");
  if (!(cfg.outside_calls >= 0.0)) throw config_error("alpha must be nonnegative");
  if (!(cfg.utility_scale > 0.0)) throw config_error("gamma must be positive");
  if (!cfg.initial_cash.empty()) {
    if (cfg.initial_cash.size() != static_cast<std::size_t>(cfg.provider_count))
      throw config_error("expected one initial-cash entry per provider");
    for (double e : cfg.initial_cash)
      if (!(e >= 0.0)) throw config_error("initial cash must be nonnegative");
  }
  if (!(cfg.total_subsidy >= 0.0)) throw config_error("xi must be nonnegative");
}

inline void validate(const GovernmentPolicy& policy, const MarketConfig& cfg) {
  if (policy.grants.size() != static_cast<std::size_t>(cfg.provider_count))
    throw config_error("expected one subsidy grant per provider");
  double total = 0.0;
  for (double g : policy.grants) {
    if (!(g >= 0.0)) throw config_error("subsidy grants must be nonnegative");
    total += g;
  }
  if (total > cfg.total_subsidy * (1.0 + 1e-12) + 1e-9)
    throw config_error("subsidy grants sum to " + std::to_string(total) +
                       " which exceeds the budget " + std::to_string(cfg.total_subsidy));
  if (!policy.linear_mode()) {
    const double at_zero = policy.penalty(0.0);
    if (std::abs(at_zero - 1.0) > 1e-12)
      throw config_error("penalty function must return 1 for zero outside calls");
  }
}

}  // namespace specmkt

#endif  // SPECMKT_MARKET_HPP
