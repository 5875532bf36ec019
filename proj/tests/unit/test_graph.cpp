#include <gtest/gtest.h>

#include <random>

#include "../oracles.hpp"
#include "support.hpp"
#include "atlas/graph.hpp"

using namespace atlas;

TEST(Graph, RejectsBadEdges) {
  EXPECT_ERRC(Graph(3, {{0, 0}}), InvalidEdge);
  EXPECT_ERRC(Graph(3, {{0, 3}}), InvalidEdge);
  EXPECT_ERRC(Graph(3, {{0, 1}, {1, 0}}), InvalidEdge);
}

TEST(Graph, ComplementAndInduced) {
  auto c5 = cycle_graph(5);
  EXPECT_EQ(c5.complement(), c5.complement().complement().complement());
  EXPECT_EQ(c5.complement().edges().size(), 5u);
  EXPECT_EQ(c5.induced({0, 1, 2}), Graph(3, {{0, 1}, {1, 2}}));
}

TEST(Graph, MaximalCliquesMatchBruteForce) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    auto g = oracle::random_graph(3 + trial % 10, 0.2 + 0.05 * (trial % 12), rng);
    auto cliques = maximal_cliques(g);
    std::sort(cliques.begin(), cliques.end());
    EXPECT_EQ(cliques, oracle::cliques_brute_force(g)) << "trial " << trial;
  }
}

TEST(Graph, MaximalCliquesIncludeIsolatedVertices) {
  auto cliques = maximal_cliques(Graph(3, {{0, 1}}));
  std::sort(cliques.begin(), cliques.end());
  EXPECT_EQ(cliques, (std::vector<std::vector<int>>{{0, 1}, {2}}));
}

TEST(Graph, IndependenceNumberSmallFamilies) {
  EXPECT_EQ(independence_number(cycle_graph(5)), 2);
  EXPECT_EQ(independence_number(cycle_graph(8)), 4);
  EXPECT_EQ(independence_number(complete_graph(7)), 1);
  EXPECT_EQ(independence_number(edgeless_graph(9)), 9);
  EXPECT_EQ(independence_number(complete_multipartite({3, 2, 4})), 4);
  EXPECT_EQ(independence_number(Graph(0)), 0);
}

TEST(Graph, IndependenceNumberMatchesBruteForce) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 80; ++trial) {
    auto g = oracle::random_graph(1 + trial % 16, 0.1 + 0.01 * trial, rng);
    EXPECT_EQ(independence_number(g), oracle::independence_number(g)) << "trial " << trial;
  }
}

TEST(Graph, IndependenceNumberSizeLimit) {
  EXPECT_ERRC(independence_number(edgeless_graph(10), 8), SizeLimitExceeded);
}

TEST(Graph, PartitionsAreValidAndMinimal) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    auto g = oracle::random_graph(2 + trial % 8, 0.4, rng);
    for (std::size_t n = 1; n <= g.size(); ++n) {
      auto p = find_n_partition(g, n);
      bool exists = false;
      for (std::size_t k = 1; k <= n; ++k) exists = exists || oracle::colourable(g, k);
      if (!p) {
        EXPECT_FALSE(oracle::colourable(g, n)) << "trial " << trial << " n " << n;
        continue;
      }
      EXPECT_TRUE(exists);
      EXPECT_EQ(p->parts.size(), n);
      EXPECT_TRUE(is_valid_partition(g, *p));
    }
  }
}

TEST(Graph, PartitionEnumerationIsLexicographic) {
  std::vector<Partition> seen;
  for_each_n_partition(cycle_graph(4), 2, [&](const Partition& p) {
    seen.push_back(p);
    return true;
  });
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_EQ(seen[0].parts, (std::vector<std::vector<int>>{{0, 2}, {1, 3}}));

  auto p = find_n_partition(edgeless_graph(3), 2);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->parts, (std::vector<std::vector<int>>{{0, 1}, {2}}));
  EXPECT_EQ(p->undersized(), std::vector<int>{1});
}

TEST(Graph, CompleteMultipartiteRecognition) {
  auto k33 = complete_multipartite({3, 3});
  auto p = is_complete_n_partite(k33);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->parts, (std::vector<std::vector<int>>{{0, 1, 2}, {3, 4, 5}}));
  EXPECT_TRUE(is_complete_n_partite(cycle_graph(4)));
  EXPECT_FALSE(is_complete_n_partite(cycle_graph(5)));
  EXPECT_FALSE(is_complete_n_partite(cycle_graph(6)));
}

TEST(Graph, InvalidPartitions) {
  auto c4 = cycle_graph(4);
  EXPECT_FALSE(is_valid_partition(c4, Partition{{{0, 1}, {2, 3}}}));
  EXPECT_FALSE(is_valid_partition(c4, Partition{{{0, 2}, {1}}}));
  EXPECT_FALSE(is_valid_partition(c4, Partition{{{0, 2}, {1, 3, 3}}}));
}
