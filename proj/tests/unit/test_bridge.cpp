#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "atlas/bridge.hpp"
#include "support.hpp"

using namespace atlas;

TEST(Bridge, NCycleFamily) {
  for (std::size_t n = 4; n <= 9; ++n) {
    auto c = n_cycle(n);
    EXPECT_EQ(c.scenario->size(), n);
    EXPECT_EQ(c.inequality.bound(), oracle::classical_bound(c.inequality));
    EXPECT_EQ(c.inequality.bound(), Rational(n - 2));
  }
  EXPECT_ERRC(n_cycle(3), TooSmall);
}

TEST(Bridge, PearleHexagonInequalities) {
  auto h = pearle_hexagon();
  EXPECT_EQ(h.gamma.bound(), 4);
  EXPECT_EQ(oracle::classical_bound(h.gamma), 4);
  EXPECT_EQ(oracle::classical_bound(h.gamma_prime), 4);
  EXPECT_EQ(h.gamma.kind(), BoundKind::NCHV);
  EXPECT_EQ(h.gamma_prime.kind(), BoundKind::LR);
  EXPECT_EQ(h.bell->compat(), complete_multipartite({3, 3}).induced({0, 3, 1, 4, 2, 5}));
  EXPECT_EQ(tightness_test(h.gamma).verdict, Verdict::Facet);
  EXPECT_EQ(tightness_test(h.gamma_prime).verdict, Verdict::LowerDimensionalFace);
}

TEST(Bridge, KsToBellReproducesPearle) {
  auto h = pearle_hexagon();
  auto r = ks_to_bell(h.gamma, h.partition);
  ASSERT_TRUE(r.target);
  EXPECT_EQ(*r.target, h.gamma_prime);
  EXPECT_EQ(r.labels, (std::vector<std::string>{"A1", "B2", "A3", "B4", "A5", "B6"}));
  EXPECT_TRUE(r.bound_preserved);
  EXPECT_EQ(r.connection, ConnectionClass::Partial);
  EXPECT_EQ(r.tightness_change, "lost");
  EXPECT_FALSE(r.notes.empty());
}

TEST(Bridge, ChshRoundTripIsIdentity) {
  auto c = chsh();
  auto forward = bell_to_ks(c.inequality);
  ASSERT_TRUE(forward.target);
  EXPECT_EQ(forward.connection, ConnectionClass::OneToOne);
  EXPECT_EQ(forward.source_tightness, *forward.target_tightness);
  EXPECT_EQ(forward.tightness_change, "preserved");
  EXPECT_EQ(forward.target->kind(), BoundKind::NCHV);
  auto back = ks_to_bell(*forward.target, *forward.partition);
  ASSERT_TRUE(back.target);
  EXPECT_EQ(*back.target, c.inequality);
  EXPECT_EQ(back.connection, ConnectionClass::OneToOne);
  EXPECT_EQ(*back.target_tightness, forward.source_tightness);
}

TEST(Bridge, BellToKsKeepsGammaPrime) {
  auto h = pearle_hexagon();
  auto r = bell_to_ks(h.gamma_prime);
  EXPECT_EQ(*r.target_bound, 4);
  EXPECT_EQ(r.source_tightness, *r.target_tightness);
  EXPECT_EQ(r.source_tightness.verdict, Verdict::LowerDimensionalFace);
  EXPECT_ERRC(bell_to_ks(h.gamma), NotABellScenario);
}

TEST(Bridge, PartitionErrors) {
  auto h = pearle_hexagon();
  EXPECT_ERRC(ks_to_bell(h.gamma, Partition{{{0, 1, 2}, {3, 4, 5}}}), InvalidPartition);
  EXPECT_ERRC(ks_to_bell(h.gamma, Partition{{{0, 2, 4}, {1, 3}}}), InvalidPartition);
  EXPECT_ERRC(ks_to_bell(h.gamma, Partition{{{0, 2, 4, 1, 3, 5}}}), InvalidPartition);
  EXPECT_ERRC(ks_to_bell(h.gamma, Partition{{{0, 2, 4}, {1, 3}, {5}}}), UndersizedPart);
}

TEST(Bridge, SmallestPartition) {
  auto p = smallest_bell_partition(cycle_graph(6));
  ASSERT_TRUE(p);
  EXPECT_EQ(p->parts, (std::vector<std::vector<int>>{{0, 2, 4}, {1, 3, 5}}));
  auto odd = smallest_bell_partition(cycle_graph(7));
  ASSERT_TRUE(odd);
  EXPECT_EQ(odd->parts.size(), 3u);
  EXPECT_TRUE(is_valid_partition(cycle_graph(7), *odd));
  EXPECT_FALSE(smallest_bell_partition(complete_graph(4)));
}

TEST(Bridge, MapReportClassifies) {
  auto c = chsh();
  EXPECT_EQ(map_report(c.inequality).connection, ConnectionClass::OneToOne);
  auto r8 = map_report(n_cycle(8).inequality);
  EXPECT_EQ(r8.connection, ConnectionClass::Partial);
  EXPECT_EQ(*r8.target_bound, 6);
  EXPECT_EQ(r8.tightness_change, "lost");

  auto tri = build_scenario({"a", "b", "c"}, {2, 2, 2}, {{0, 1}, {1, 2}, {0, 2}});
  Inequality t(tri, {{{0, 1}, {0, 0}, 1}}, 1, BoundKind::NCHV);
  auto lift = map_report(t);
  EXPECT_EQ(lift.connection, ConnectionClass::GenericLift);
  EXPECT_FALSE(lift.target);
  EXPECT_EQ(lift.source_bound, 1);
  EXPECT_EQ(to_string(ConnectionClass::GenericLift), "generic-lift");
}

TEST(Bridge, MapReportQuantumEstimates) {
  MapOptions opts;
  opts.dimension = 2;
  opts.seesaw.restarts = 5;
  auto r = map_report(pearle_hexagon().gamma, opts);
  ASSERT_TRUE(r.source_quantum && r.target_quantum);
  EXPECT_NEAR(r.source_quantum->value, 6 * std::cos(std::numbers::pi / 6), 1e-6);
  EXPECT_NEAR(r.target_quantum->value, 6 * std::cos(std::numbers::pi / 6), 1e-6);
}

TEST(Bridge, SicLiftOfPeresMermin) {
  auto r = sic_to_bell(pm_square());
  EXPECT_EQ(r.local_bound, 4);
  EXPECT_FALSE(r.local_bound_mismatch);
  EXPECT_EQ(r.mu, 4);
  EXPECT_GT(r.quantum_value, to_double(r.local_bound) + 1e-6);
  EXPECT_NEAR(r.violation, r.quantum_value - to_double(r.local_bound), 1e-12);
  ASSERT_EQ(r.removals.size(), 9u);
  for (const auto& rem : r.removals) EXPECT_LE(rem.violation, 1e-9) << rem.id;
}

TEST(Bridge, SicLiftRejectsNonSic) {
  auto pm = pm_square();
  EXPECT_ERRC(sic_to_bell(remove_element(pm, "M11")), SicVerificationFailed);
}
