#include <doctest.h>

#include "helpers.hpp"
#include "specmkt/best_response.hpp"
#include "specmkt/foc.hpp"

using namespace specmkt;

TEST_CASE("residuals are the derivatives of the objective") {
  const auto cfg = testutil::baseline_market();
  const auto policy = GovernmentPolicy::linear({400.0, 600.0});
  // interior point: every utility strictly positive, so the clamped
  // objective and the differentiated expressions coincide
  const ProviderVars own{150.0, 120.0, 6.0, 0.0};
  const OpponentVars opp{200.0, 180.0, 7.0};
  const auto res = residuals_provider1(own, opp, policy, cfg);

  const auto objective_at = [&](double s1, double s2, double fee) {
    return provider_objective(0, testutil::profile(s1, s2, opp.s1, opp.s2, fee, opp.fee),
                              policy, cfg);
  };
  const double h = 1e-6;
  const double d_fee = testutil::central_difference(
      [&](double f) { return objective_at(own.s1, own.s2, f); }, own.fee, h);
  const double d_s1 = testutil::central_difference(
      [&](double s) { return objective_at(s, own.s2, own.fee); }, own.s1, h);
  const double d_s2 = testutil::central_difference(
      [&](double s) { return objective_at(own.s1, s, own.fee); }, own.s2, h);

  CHECK(res.fee_condition == doctest::Approx(d_fee).epsilon(1e-4));
  CHECK(res.spend1_condition == doctest::Approx(d_s1).epsilon(1e-4));
  CHECK(res.spend2_condition == doctest::Approx(d_s2).epsilon(1e-4));

  // mirrored expressions for provider 2
  const ProviderVars own2{180.0, 230.0, 8.0, 0.0};
  const OpponentVars opp2{150.0, 120.0, 6.0};
  const auto res2 = residuals_provider2(own2, opp2, policy, cfg);
  const auto objective2_at = [&](double s1, double s2, double fee) {
    return provider_objective(
        1, testutil::profile(opp2.s1, opp2.s2, s1, s2, opp2.fee, fee), policy, cfg);
  };
  CHECK(res2.fee_condition ==
        doctest::Approx(testutil::central_difference(
                            [&](double f) { return objective2_at(own2.s1, own2.s2, f); },
                            own2.fee, h))
            .epsilon(1e-4));
  CHECK(res2.spend1_condition ==
        doctest::Approx(testutil::central_difference(
                            [&](double s) { return objective2_at(s, own2.s2, own2.fee); },
                            own2.s1, h))
            .epsilon(1e-4));
}

TEST_CASE("multiplier enters affinely") {
  const auto cfg = testutil::baseline_market();
  const auto policy = GovernmentPolicy::linear({400.0, 600.0});
  const OpponentVars opp{200.0, 180.0, 7.0};
  const ProviderVars base{150.0, 120.0, 6.0, 0.3};
  const auto r0 = residuals_provider1(base, opp, policy, cfg);
  ProviderVars bumped = base;
  bumped.lambda += 0.7;
  const auto r1 = residuals_provider1(bumped, opp, policy, cfg);
  CHECK(r1.spend1_condition == doctest::Approx(r0.spend1_condition - 0.7).epsilon(1e-12));
  CHECK(r1.spend2_condition == doctest::Approx(r0.spend2_condition - 0.7).epsilon(1e-12));
  CHECK(r1.fee_condition == r0.fee_condition);
}

TEST_CASE("symmetric instance has symmetric spend conditions") {
  auto cfg = testutil::market(60, 60, 50.0);
  const auto policy = GovernmentPolicy::linear({500.0, 500.0});
  const auto fees = optimum_fees(cfg, policy);
  const ProviderVars own{250.0, 250.0, fees[0], 0.0};
  const OpponentVars opp{250.0, 250.0, fees[1]};
  const auto res = residuals_provider1(own, opp, policy, cfg);
  CHECK(res.spend1_condition == doctest::Approx(res.spend2_condition).epsilon(1e-10));
}

TEST_CASE("nonpositive spends are a singular domain") {
  const auto cfg = testutil::baseline_market();
  const auto policy = GovernmentPolicy::linear({400.0, 600.0});
  CHECK_THROWS_AS(
      residuals_provider1({0.0, 120.0, 6.0, 0.0}, {200.0, 180.0, 7.0}, policy, cfg),
      singular_domain_error);
  CHECK_THROWS_AS(
      residuals_provider1({150.0, 120.0, 6.0, 0.0}, {200.0, 0.0, 7.0}, policy, cfg),
      singular_domain_error);
}

TEST_CASE("complementarity violation is reported") {
  const auto cfg = testutil::baseline_market();
  const auto policy = GovernmentPolicy::linear({400.0, 600.0});
  const OpponentVars opp{200.0, 180.0, 7.0};
  // over budget
  auto res = residuals_provider1({300.0, 150.0, 6.0, 0.0}, opp, policy, cfg);
  CHECK(res.complementarity == doctest::Approx(50.0).epsilon(1e-12));
  // positive multiplier with slack
  res = residuals_provider1({100.0, 100.0, 6.0, 2.0}, opp, policy, cfg);
  CHECK(res.complementarity == doctest::Approx(2.0).epsilon(1e-12));
  // positive multiplier on the face
  res = residuals_provider1({250.0, 150.0, 6.0, 2.0}, opp, policy, cfg);
  CHECK(res.complementarity == 0.0);
}

TEST_CASE("best response recovers the converged strategy") {
  const auto cfg = testutil::baseline_market();
  const auto policy = GovernmentPolicy::linear({400.0, 600.0});
  const auto eq = solve_equilibrium(cfg, policy);
  REQUIRE(eq.converged);
  for (int j = 0; j < 2; ++j) {
    const auto o = static_cast<std::size_t>(1 - j);
    const OpponentVars opp{eq.profile.spend(o, 0), eq.profile.spend(o, 1),
                           eq.profile.fees[o]};
    const auto response = best_response_provider(j, opp, policy, cfg);
    const auto jj = static_cast<std::size_t>(j);
    CHECK(response.foc_root);
    CHECK(response.vars.s1 ==
          doctest::Approx(eq.profile.spend(jj, 0)).epsilon(1e-6));
    CHECK(response.vars.s2 ==
          doctest::Approx(eq.profile.spend(jj, 1)).epsilon(1e-6));
    CHECK(response.vars.fee == doctest::Approx(eq.profile.fees[jj]).epsilon(1e-6));
    CHECK(response.residual.max_abs() <= 1e-8);
  }
}

TEST_CASE("best response to a silent opponent saturates the budget") {
  const auto cfg = testutil::baseline_market();
  const auto policy = GovernmentPolicy::linear({400.0, 600.0});
  for (int j = 0; j < 2; ++j) {
    const auto response = best_response_provider(j, {0.0, 0.0, 0.0}, policy, cfg);
    const double budget = policy.grants[static_cast<std::size_t>(j)];
    CHECK(response.vars.s1 + response.vars.s2 ==
          doctest::Approx(budget).epsilon(1e-12));
    CHECK(response.vars.fee > 0.0);
  }
}

TEST_CASE("best response to a symmetric opponent is symmetric") {
  auto cfg = testutil::market(60, 60, 50.0);
  const auto policy = GovernmentPolicy::linear({500.0, 500.0});
  const double fee = cfg.utility_scale * cfg.home_calls * std::sqrt(250.0) / 3.0;
  const auto response = best_response_provider(0, {250.0, 250.0, fee}, policy, cfg);
  CHECK(response.vars.s1 == doctest::Approx(response.vars.s2).epsilon(1e-8));
}

TEST_CASE("budget complementarity at returned responses") {
  // large market: the grant binds and the multiplier is positive
  {
    const auto cfg = testutil::baseline_market();
    const auto policy = GovernmentPolicy::linear({400.0, 600.0});
    const auto response = best_response_provider(0, {260.0, 340.0, 17.8}, policy, cfg);
    REQUIRE(response.foc_root);
    CHECK(response.vars.lambda > 0.0);
    CHECK(response.vars.s1 + response.vars.s2 == doctest::Approx(400.0).epsilon(1e-8));
  }
  // tiny market: spending the full grant cannot pay and the budget goes slack
  {
    const auto cfg = testutil::market(40, 10, 30.0);
    const auto policy = GovernmentPolicy::linear({400.0, 600.0});
    const auto eq = solve_equilibrium(cfg, policy);
    REQUIRE(eq.converged);
    const OpponentVars opp{eq.profile.spend(0, 0), eq.profile.spend(0, 1),
                           eq.profile.fees[0]};
    const auto response = best_response_provider(1, opp, policy, cfg);
    REQUIRE(response.foc_root);
    CHECK(response.vars.lambda == 0.0);
    CHECK(response.vars.s1 + response.vars.s2 <= 600.0 * (1.0 + 1e-9));
    CHECK(response.vars.s1 + response.vars.s2 < 599.0);
  }
}

TEST_CASE("best response rejects non 2x2 markets") {
  auto cfg = testutil::baseline_market();
  cfg.region_count = 3;
  cfg.populations = {40, 80, 10};
  const auto policy = GovernmentPolicy::linear({400.0, 600.0});
  CHECK_THROWS_AS(best_response_provider(0, {1.0, 1.0, 0.0}, policy, cfg),
                  std::invalid_argument);
}
