#include <doctest.h>

#include "helpers.hpp"
#include "specmkt/best_response.hpp"

using namespace specmkt;

namespace {

FocResidual residual_with_multiplier(int provider, const EquilibriumResult& eq,
                                     const GovernmentPolicy& policy,
                                     const MarketConfig& cfg) {
  const auto j = static_cast<std::size_t>(provider);
  const auto o = 1 - j;
  ProviderVars own{eq.profile.spend(j, 0), eq.profile.spend(j, 1), eq.profile.fees[j],
                   0.0};
  const OpponentVars opp{eq.profile.spend(o, 0), eq.profile.spend(o, 1),
                         eq.profile.fees[o]};
  auto base = provider == 0 ? residuals_provider1(own, opp, policy, cfg)
                            : residuals_provider2(own, opp, policy, cfg);
  own.lambda = std::max(0.0, 0.5 * (base.spend1_condition + base.spend2_condition));
  return provider == 0 ? residuals_provider1(own, opp, policy, cfg)
                       : residuals_provider2(own, opp, policy, cfg);
}

}  // namespace

TEST_CASE("demo instance converges to a stationarity root") {
  const auto cfg = testutil::demo_market();
  const auto policy = GovernmentPolicy::linear({262.0, 738.0});
  const auto eq = solve_equilibrium(cfg, policy);

  REQUIRE(eq.converged);
  CHECK(eq.iterations >= 1);
  CHECK(eq.iterations <= 500);
  CHECK(eq.trace.size() == static_cast<std::size_t>(eq.iterations) + 1);

  // starts from the all-zero profile
  const auto& first = eq.trace.front();
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(first.profile.fees[j] == 0.0);
    CHECK(first.profile.spend(j, 0) == 0.0);
    CHECK(first.profile.spend(j, 1) == 0.0);
  }
  // at the all-zero state each provider just holds its uniform reward share
  CHECK(first.objectives[0] == doctest::Approx(500.0).epsilon(1e-12));
  CHECK(first.objectives[1] == doctest::Approx(500.0).epsilon(1e-12));

  // the grants are spent in full
  CHECK(eq.profile.spend(0, 0) + eq.profile.spend(0, 1) ==
        doctest::Approx(262.0).epsilon(1e-3));
  CHECK(eq.profile.spend(1, 0) + eq.profile.spend(1, 1) ==
        doctest::Approx(738.0).epsilon(1e-3));

  for (int j = 0; j < 2; ++j)
    CHECK(residual_with_multiplier(j, eq, policy, cfg).max_abs() <= 1e-6);
}

TEST_CASE("symmetric market converges to a symmetric profile") {
  const auto cfg = testutil::market(120, 120, 60.0);
  const auto policy = GovernmentPolicy::linear({500.0, 500.0});
  const auto eq = solve_equilibrium(cfg, policy);
  REQUIRE(eq.converged);
  CHECK(eq.profile.spend(0, 0) == doctest::Approx(eq.profile.spend(1, 0)).epsilon(1e-6));
  CHECK(eq.profile.spend(0, 1) == doctest::Approx(eq.profile.spend(1, 1)).epsilon(1e-6));
  CHECK(eq.profile.spend(0, 0) == doctest::Approx(eq.profile.spend(0, 1)).epsilon(1e-6));
  CHECK(eq.profile.fees[0] == doctest::Approx(eq.profile.fees[1]).epsilon(1e-6));
}

TEST_CASE("baseline instance satisfies the stationarity system") {
  const auto cfg = testutil::baseline_market();
  const auto policy = GovernmentPolicy::linear({400.0, 600.0});
  // the residual at the rest point shrinks with the stopping threshold
  SolveOptions opts;
  opts.epsilon = 1e-4;
  const auto eq = solve_equilibrium(cfg, policy, opts);
  REQUIRE(eq.converged);
  for (int j = 0; j < 2; ++j)
    CHECK(residual_with_multiplier(j, eq, policy, cfg).max_abs() <= 1e-6);
}

TEST_CASE("traces are reproducible") {
  const auto cfg = testutil::baseline_market();
  const auto policy = GovernmentPolicy::linear({400.0, 600.0});
  const auto a = solve_equilibrium(cfg, policy);
  const auto b = solve_equilibrium(cfg, policy);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t t = 0; t < a.trace.size(); ++t) {
    CHECK(a.trace[t].profile == b.trace[t].profile);
    CHECK(a.trace[t].objectives == b.trace[t].objectives);
  }
}

TEST_CASE("each best-response step improves the acting provider") {
  for (const auto& [cfg, grants] :
       {std::pair{testutil::baseline_market(), std::array{400.0, 600.0}},
        std::pair{testutil::market(120, 120, 60.0), std::array{500.0, 500.0}},
        std::pair{testutil::baseline_market(), std::array{50.0, 950.0}}}) {
    const auto policy = GovernmentPolicy::linear({grants[0], grants[1]});
    const auto eq = solve_equilibrium(cfg, policy);
    REQUIRE(eq.converged);
    for (std::size_t t = 1; t < eq.trace.size(); ++t) {
      const auto& before = eq.trace[t - 1].profile;
      const auto& after = eq.trace[t].profile;
      // provider 1 acted against provider 2's previous strategy
      StrategyProfile stage = before;
      const double p1_before = provider_objective(0, stage, policy, cfg);
      stage.spend(0, 0) = after.spend(0, 0);
      stage.spend(0, 1) = after.spend(0, 1);
      stage.fees[0] = after.fees[0];
      const double p1_after = provider_objective(0, stage, policy, cfg);
      CHECK(p1_after >= p1_before - 1e-9);
      // provider 2 acted against provider 1's fresh strategy
      const double p2_before = provider_objective(1, stage, policy, cfg);
      stage.spend(1, 0) = after.spend(1, 0);
      stage.spend(1, 1) = after.spend(1, 1);
      stage.fees[1] = after.fees[1];
      const double p2_after = provider_objective(1, stage, policy, cfg);
      CHECK(p2_after >= p2_before - 1e-9);
    }
  }
}

TEST_CASE("solver inputs are validated") {
  const auto cfg = testutil::baseline_market();
  const auto policy = GovernmentPolicy::linear({400.0, 600.0});
  SolveOptions opts;
  opts.epsilon = 0.0;
  CHECK_THROWS_AS(solve_equilibrium(cfg, policy, opts), std::invalid_argument);

  auto wide = cfg;
  wide.region_count = 3;
  wide.populations = {40, 80, 10};
  CHECK_THROWS_AS(solve_equilibrium(wide, GovernmentPolicy::linear({400.0, 600.0})),
                  std::invalid_argument);

  // an exhausted iteration budget reports nonconvergence without throwing
  opts = SolveOptions{};
  opts.max_iter = 0;
  const auto eq = solve_equilibrium(cfg, policy, opts);
  CHECK_FALSE(eq.converged);
  CHECK(eq.trace.size() == 1);
}

TEST_CASE("monte carlo") {
  SUBCASE("deterministic for a fixed seed") {
    const auto a = monte_carlo(McRanges{}, 5, 424242);
    const auto b = monte_carlo(McRanges{}, 5, 424242);
    CHECK(a.within_15 == b.within_15);
    CHECK(a.from_16_to_99 == b.from_16_to_99);
    CHECK(a.at_least_100 == b.at_least_100);
    CHECK(a.nonconverged == b.nonconverged);
  }
  SUBCASE("buckets partition the runs") {
    const auto report = monte_carlo(McRanges{}, 300, 7);
    CHECK(report.within_15 + report.from_16_to_99 + report.at_least_100 +
              report.nonconverged ==
          report.run_count);
    CHECK(report.run_count == 300);
    CHECK(report.within_15 >= 255);  // at least 85 percent settle fast
    CHECK(report.nonconverged <= 3);
  }
  SUBCASE("rejects bad arguments") {
    CHECK_THROWS_AS(monte_carlo(McRanges{}, 0, 1), std::invalid_argument);
    McRanges ranges;
    ranges.beta_lo = 300;  // above beta_hi
    CHECK_THROWS_AS(monte_carlo(ranges, 10, 1), std::invalid_argument);
    ranges = McRanges{};
    ranges.xi1_hi = 1500;  // grant beyond the budget
    CHECK_THROWS_AS(monte_carlo(ranges, 10, 1), std::invalid_argument);
  }
}
