#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "../oracles.hpp"
#include "atlas/bridge.hpp"
#include "atlas/exclusivity.hpp"
#include "atlas/theta.hpp"

using namespace atlas;

namespace {

bool isomorphic(const Graph& a, const Graph& b) {
  if (a.size() != b.size() || a.edges().size() != b.edges().size()) return false;
  std::vector<int> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool same = true;
    for (auto [x, y] : a.edges())
      if (!b.adjacent(perm[x], perm[y])) {
        same = false;
        break;
      }
    if (same) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

Graph circulant(int n, std::vector<int> jumps) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j : jumps) {
      int k = (i + j) % n;
      if (i < k && std::find(e.begin(), e.end(), Edge{i, k}) == e.end()) e.emplace_back(i, k);
      if (k < i && std::find(e.begin(), e.end(), Edge{k, i}) == e.end()) e.emplace_back(k, i);
    }
  return Graph(static_cast<std::size_t>(n), e);
}

Rational event_value(const EventForm& form, const std::vector<int>& a) {
  Rational v = form.offset;
  for (std::size_t e = 0; e < form.events.size(); ++e) {
    bool hit = true;
    for (std::size_t k = 0; k < form.events[e].context.size(); ++k)
      hit = hit && a[form.events[e].context[k]] == form.events[e].assignment[k];
    if (hit) v += form.weights[e];
  }
  return v;
}

}  // namespace

TEST(Exclusivity, EventFormPreservesValues) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> coef(-5, 5);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = oracle::random_graph(3 + trial % 5, 0.5, rng);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < g.size(); ++i) ids.push_back("M" + std::to_string(i));
    auto s = build_scenario(ids, std::vector<int>(g.size(), 2 + trial % 2), g.edges());
    std::vector<Term> terms;
    for (std::size_t c = 0; c < s->contexts().size(); ++c)
      for (std::size_t idx = 0; idx < s->table_size(c); idx += 2)
        terms.push_back({s->contexts()[c].members, s->decode_index(c, idx), coef(rng)});
    Inequality ineq(s, terms, 3, BoundKind::NCHV);
    auto form = to_event_form(ineq);
    for (const auto& w : form.weights) EXPECT_GT(w, 0);
    EXPECT_EQ(form.bound, ineq.bound() - form.offset);
    std::vector<int> a(s->size(), 0);
    for (int k = 0; k < 20; ++k) {
      for (auto& x : a) x = static_cast<int>(rng() % static_cast<unsigned>(2 + trial % 2));
      EXPECT_EQ(event_value(form, a), evaluate_assignment(ineq, a));
    }
  }
}

TEST(Exclusivity, KcbsGivesPentagon) {
  auto s = build_scenario({"M0", "M1", "M2", "M3", "M4"}, {2, 2, 2, 2, 2}, cycle_graph(5).edges());
  std::vector<Term> terms;
  for (int i = 0; i < 5; ++i) terms.push_back({{i, (i + 1) % 5}, {0, 1}, 1});
  Inequality kcbs(s, terms, 2, BoundKind::NCHV);
  auto form = to_event_form(kcbs);
  EXPECT_TRUE(form.unit_weights());
  EXPECT_EQ(form.offset, 0);
  auto g = exclusivity_graph(form);
  EXPECT_TRUE(isomorphic(g, cycle_graph(5)));
  EXPECT_EQ(independence_number(g), 2);
  EXPECT_EQ(classical_bound(kcbs), 2);
}

TEST(Exclusivity, ChshGraphIsCirculant) {
  auto form = to_event_form(chsh().inequality);
  EXPECT_EQ(form.events.size(), 8u);
  EXPECT_EQ(form.offset, -4);
  EXPECT_EQ(form.bound, 6);
  for (const auto& w : form.weights) EXPECT_EQ(w, 2);
  auto g = exclusivity_graph(form);
  EXPECT_EQ(g.edges().size(), 12u);
  EXPECT_TRUE(isomorphic(g, circulant(8, {1, 4})));
  // 2 alpha - 4 and 2 theta - 4 reproduce the local bound and Tsirelson's bound.
  EXPECT_EQ(2 * independence_number(g) - 4, 2);
  auto t = lovasz_theta(g, 1e-8);
  EXPECT_NEAR(2 * t.midpoint() - 4, 2 * std::sqrt(2.0), 1e-6);
}

TEST(Exclusivity, ExclusiveNeedsConflictingSharedOutcome) {
  EXPECT_TRUE(exclusive({{0, 1}, {0, 1}}, {{1, 2}, {0, 0}}));
  EXPECT_FALSE(exclusive({{0, 1}, {0, 1}}, {{1, 2}, {1, 0}}));
  EXPECT_FALSE(exclusive({{0}, {0}}, {{1}, {1}}));
}
