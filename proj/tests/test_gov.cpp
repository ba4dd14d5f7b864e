#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "specmkt/gov.hpp"

using namespace specmkt;

TEST_CASE("symmetric market sweeps symmetrically") {
  const auto cfg = testutil::market(100, 100, 60.0);
  SweepOptions opts;
  opts.grid_size = 9;
  const auto result = sweep(cfg, opts);

  REQUIRE(result.grid.size() == 9);
  // welfare curve symmetric about the center
  for (std::size_t i = 0; i < result.grid.size() / 2; ++i) {
    const auto mirror = result.grid.size() - 1 - i;
    CHECK(result.welfare[i] ==
          doctest::Approx(result.welfare[mirror]).epsilon(1e-6));
  }
  // concave utilities favour concentrated grants, so the curve dips at the
  // even split and the optimum sits at a sweep edge
  CHECK(result.welfare[result.grid.size() / 2] <= result.welfare.front());
  CHECK(std::min(result.xi_star[0], result.xi_star[1]) ==
        doctest::Approx(50.0).epsilon(1e-12));
  CHECK(result.xi_star[0] + result.xi_star[1] == doctest::Approx(1000.0).epsilon(1e-12));
}

TEST_CASE("grid refinement never loses welfare") {
  const auto cfg = testutil::baseline_market();
  SweepOptions coarse;
  coarse.grid_size = 5;
  SweepOptions fine;
  fine.grid_size = 9;  // superset of the coarse grid points
  const auto a = sweep(cfg, coarse);
  const auto b = sweep(cfg, fine);
  CHECK(b.welfare[static_cast<std::size_t>(b.argmax_index)] >=
        a.welfare[static_cast<std::size_t>(a.argmax_index)] - 1e-9);
}

TEST_CASE("argmax dominates every converged point") {
  const auto cfg = testutil::baseline_market();
  SweepOptions opts;
  opts.grid_size = 7;
  const auto result = sweep(cfg, opts);
  const double best = result.welfare[static_cast<std::size_t>(result.argmax_index)];
  for (std::size_t i = 0; i < result.welfare.size(); ++i) {
    if (!result.equilibria[i].converged) continue;
    CHECK(best >= result.welfare[i]);
  }
}

TEST_CASE("provider objectives move with their grants across the sweep") {
  const auto cfg = testutil::baseline_market();
  SweepOptions opts;
  opts.grid_size = 10;
  const auto result = sweep(cfg, opts);
  for (std::size_t i = 1; i < result.grid.size(); ++i) {
    if (!result.equilibria[i].converged || !result.equilibria[i - 1].converged) continue;
    const double slack0 = 1e-3 * std::abs(result.equilibria[i - 1].objectives[0]);
    const double slack1 = 1e-3 * std::abs(result.equilibria[i - 1].objectives[1]);
    CHECK(result.equilibria[i].objectives[0] >=
          result.equilibria[i - 1].objectives[0] - slack0);
    CHECK(result.equilibria[i].objectives[1] <=
          result.equilibria[i - 1].objectives[1] + slack1);
  }
}

TEST_CASE("welfare changes smoothly between neighbours") {
  const auto cfg = testutil::baseline_market();
  SweepOptions opts;
  opts.grid_size = 11;
  const auto result = sweep(cfg, opts);
  std::vector<double> increments;
  for (std::size_t i = 1; i < result.welfare.size(); ++i)
    increments.push_back(std::abs(result.welfare[i] - result.welfare[i - 1]));
  auto sorted = increments;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (const double inc : increments) CHECK(inc <= 10.0 * std::max(median, 1e-9));
}

TEST_CASE("sweep input validation and failure") {
  const auto cfg = testutil::baseline_market();
  SweepOptions opts;
  opts.grid_size = 1;
  CHECK_THROWS_AS(sweep(cfg, opts), std::invalid_argument);

  opts.grid_size = 3;
  opts.solve.max_iter = 0;  // nothing can converge
  CHECK_THROWS_AS(sweep(cfg, opts), nonconvergence_error);
}
