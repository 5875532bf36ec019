#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "atlas/bridge.hpp"
#include "atlas/seesaw.hpp"
#include "support.hpp"

using namespace atlas;

TEST(Seesaw, ChshReachesTsirelson) {
  auto r = seesaw_max(chsh().inequality);
  EXPECT_NEAR(r.value, 2 * std::sqrt(2.0), 1e-8);
  EXPECT_EQ(r.parties.size(), 2u);
  EXPECT_EQ(r.runs.size(), 20u);
}

TEST(Seesaw, EvenCyclesReachOracle) {
  for (int n : {4, 6, 8}) {
    auto r = seesaw_max(n_cycle(n).inequality);
    EXPECT_NEAR(r.value, oracle::n_cycle_even_value(n), 1e-6) << n;
  }
}

TEST(Seesaw, TracesAreMonotone) {
  auto r = seesaw_max(n_cycle(6).inequality, {.restarts = 5});
  for (const auto& run : r.runs)
    for (std::size_t k = 1; k < run.trace.size(); ++k) EXPECT_GE(run.trace[k], run.trace[k - 1] - 1e-9);
}

TEST(Seesaw, ModelReproducesValue) {
  auto c = n_cycle(4);
  auto r = seesaw_max(c.inequality, {.restarts = 4});
  ASSERT_TRUE(r.model);
  auto b = quantum_behavior(*r.model, c.scenario);
  EXPECT_TRUE(validate_behavior(*c.scenario, b, 1e-9).valid());
  EXPECT_NEAR(evaluate(c.inequality, b), r.value, 1e-8);
}

TEST(Seesaw, NeverExceedsThetaBound) {
  // For CHSH the event form gives value = 2 P_events - 4 with P_events <= theta(Ci8(1,4)) = 2 + sqrt 2.
  auto r = seesaw_max(chsh().inequality, {.restarts = 3, .seed = 77});
  EXPECT_LE(r.value, 2 * std::sqrt(2.0) + 1e-9);
}

TEST(Seesaw, SeedIsDeterministic) {
  auto a = seesaw_max(n_cycle(5).inequality, {.restarts = 3, .seed = 9});
  auto b = seesaw_max(n_cycle(5).inequality, {.restarts = 3, .seed = 9});
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.best_restart, b.best_restart);
}

TEST(Seesaw, Errors) {
  auto s = build_scenario({"a", "b"}, {3, 2}, {{0, 1}});
  Inequality ineq(s, {{{0, 1}, {2, 0}, 1}}, 1, BoundKind::NCHV);
  EXPECT_ERRC(seesaw_max(ineq), NotDichotomic);
  EXPECT_ERRC(seesaw_max(chsh().inequality, {.local_dimension = 64, .max_dimension = 1024}), DimensionTooLarge);
  EXPECT_ERRC(seesaw_max(chsh().inequality, {.restarts = 0}), UsageError);
}
