#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "atlas/error.hpp"

namespace atlas {

using Edge = std::pair<int, int>;

/// Simple undirected graph on vertices 0..n-1 with a canonical sorted edge list.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n) : n_(n), adj_(n, std::vector<char>(n, 0)) {}

  /// Rejects self-loops, out-of-range endpoints and repeated edges with InvalidEdge.
  Graph(std::size_t n, const std::vector<Edge>& edges) : Graph(n) {
    for (auto [a, b] : edges) {
      if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n)
        throw Error(Errc::InvalidEdge, "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                           ") has an endpoint outside 0.." + std::to_string(n) + "-1");
      if (a == b) throw Error(Errc::InvalidEdge, "self-loop at vertex " + std::to_string(a));
      if (adj_[a][b])
        throw Error(Errc::InvalidEdge, "duplicate edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
      adj_[a][b] = adj_[b][a] = 1;
      edges_.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(edges_.begin(), edges_.end());
  }

  std::size_t size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool adjacent(int a, int b) const { return adj_[a][b] != 0; }

  int degree(int v) const { return static_cast<int>(std::count(adj_[v].begin(), adj_[v].end(), 1)); }

  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    for (std::size_t u = 0; u < n_; ++u)
      if (adj_[v][u]) out.push_back(static_cast<int>(u));
    return out;
  }

  Graph complement() const {
    std::vector<Edge> e;
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = a + 1; b < n_; ++b)
        if (!adj_[a][b]) e.emplace_back(static_cast<int>(a), static_cast<int>(b));
    return Graph(n_, e);
  }

  /// Subgraph induced on `keep`, relabelled 0..keep.size()-1 in the given order.
  Graph induced(const std::vector<int>& keep) const {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < keep.size(); ++i)
      for (std::size_t j = i + 1; j < keep.size(); ++j)
        if (adj_[keep[i]][keep[j]]) e.emplace_back(static_cast<int>(i), static_cast<int>(j));
    return Graph(keep.size(), e);
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<char>> adj_;
};

inline Graph cycle_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(static_cast<int>(i), static_cast<int>((i + 1) % n));
  return Graph(n, e);
}

inline Graph complete_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(static_cast<int>(i), static_cast<int>(j));
  return Graph(n, e);
}

inline Graph edgeless_graph(std::size_t n) { return Graph(n); }

/// Complete multipartite graph; vertices are numbered part by part.
inline Graph complete_multipartite(const std::vector<std::size_t>& part_sizes) {
  std::vector<int> part_of;
  for (std::size_t p = 0; p < part_sizes.size(); ++p)
    for (std::size_t k = 0; k < part_sizes[p]; ++k) part_of.push_back(static_cast<int>(p));
  std::vector<Edge> e;
  for (std::size_t i = 0; i < part_of.size(); ++i)
    for (std::size_t j = i + 1; j < part_of.size(); ++j)
      if (part_of[i] != part_of[j]) e.emplace_back(static_cast<int>(i), static_cast<int>(j));
  return Graph(part_of.size(), e);
}

// ---------------------------------------------------------------------------
// Maximal cliques
// ---------------------------------------------------------------------------

namespace detail {

inline void bron_kerbosch_pivot(const Graph& g, std::vector<int>& clique, std::vector<int> candidates,
                                std::vector<int> excluded, std::vector<std::vector<int>>& out) {
  if (candidates.empty() && excluded.empty()) {
    auto sorted = clique;
    std::sort(sorted.begin(), sorted.end());
    out.push_back(std::move(sorted));
    return;
  }
  // Pivot maximizing |candidates ∩ N(pivot)|; ties go to the smallest vertex.
  int pivot = -1;
  int best = -1;
  for (const auto* pool : {&candidates, &excluded}) {
    for (int u : *pool) {
      int cnt = 0;
      for (int v : candidates) cnt += g.adjacent(u, v);
      if (cnt > best || (cnt == best && u < pivot)) {
        best = cnt;
        pivot = u;
      }
    }
  }
  std::vector<int> branch;
  for (int v : candidates)
    if (!g.adjacent(pivot, v)) branch.push_back(v);
  for (int v : branch) {
    std::vector<int> next_candidates, next_excluded;
    for (int u : candidates)
      if (g.adjacent(v, u)) next_candidates.push_back(u);
    for (int u : excluded)
      if (g.adjacent(v, u)) next_excluded.push_back(u);
    clique.push_back(v);
    bron_kerbosch_pivot(g, clique, std::move(next_candidates), std::move(next_excluded), out);
    clique.pop_back();
    candidates.erase(std::find(candidates.begin(), candidates.end(), v));
    excluded.push_back(v);
  }
}

}  // namespace detail

/// All maximal cliques, each sorted ascending, listed in lexicographic order.
inline std::vector<std::vector<int>> maximal_cliques(const Graph& g) {
  std::vector<std::vector<int>> out;
  if (g.size() == 0) return out;
  std::vector<int> all(g.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<int> clique;
  detail::bron_kerbosch_pivot(g, clique, all, {}, out);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Partitions into independent sets
// ---------------------------------------------------------------------------

struct Partition {
  std::vector<std::vector<int>> parts;

  /// Indices of parts holding fewer than two vertices.
  std::vector<int> undersized() const {
    std::vector<int> out;
    for (std::size_t p = 0; p < parts.size(); ++p)
      if (parts[p].size() < 2) out.push_back(static_cast<int>(p));
    return out;
  }

  std::vector<int> part_of(std::size_t vertex_count) const {
    std::vector<int> owner(vertex_count, -1);
    for (std::size_t p = 0; p < parts.size(); ++p)
      for (int v : parts[p]) owner[v] = static_cast<int>(p);
    return owner;
  }

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Parts cover every vertex exactly once and each part is an independent set.
inline bool is_valid_partition(const Graph& g, const Partition& partition) {
  std::vector<int> seen(g.size(), 0);
  for (const auto& part : partition.parts) {
    if (part.empty()) return false;
    for (int v : part) {
      if (v < 0 || static_cast<std::size_t>(v) >= g.size() || seen[v]++) return false;
    }
    for (std::size_t i = 0; i < part.size(); ++i)
      for (std::size_t j = i + 1; j < part.size(); ++j)
        if (g.adjacent(part[i], part[j])) return false;
  }
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

namespace detail {

inline Partition colors_to_partition(const std::vector<int>& color, std::size_t n) {
  Partition p;
  p.parts.resize(n);
  for (std::size_t v = 0; v < color.size(); ++v) p.parts[color[v]].push_back(static_cast<int>(v));
  return p;
}

// Restricted-growth colourings using exactly `n` colours, in lexicographic order.
inline bool enumerate_colorings(const Graph& g, std::size_t n, std::size_t v, std::size_t used,
                                std::vector<int>& color, const std::function<bool(const Partition&)>& visit) {
  const std::size_t total = g.size();
  if (v == total) {
    if (used != n) return true;
    return visit(colors_to_partition(color, n));
  }
  if (total - v < n - used) return true;
  const std::size_t limit = std::min(used + 1, n);
  for (std::size_t c = 0; c < limit; ++c) {
    bool ok = true;
    for (std::size_t u = 0; u < v && ok; ++u)
      if (color[u] == static_cast<int>(c) && g.adjacent(static_cast<int>(u), static_cast<int>(v))) ok = false;
    if (!ok) continue;
    color[v] = static_cast<int>(c);
    if (!enumerate_colorings(g, n, v + 1, c == used ? used + 1 : used, color, visit)) return false;
  }
  return true;
}

}  // namespace detail

/// Visits every partition of the vertices into exactly `n` non-empty independent sets,
/// lexicographically smallest first. `visit` returns false to stop.
inline void for_each_n_partition(const Graph& g, std::size_t n, const std::function<bool(const Partition&)>& visit) {
  if (n == 0 || n > g.size()) return;
  std::vector<int> color(g.size(), -1);
  detail::enumerate_colorings(g, n, 0, 0, color, visit);
}

/// Lexicographically smallest partition into exactly `n` independent sets, or nothing when
/// the chromatic number exceeds `n`. Parts with fewer than two vertices are reported by
/// Partition::undersized().
inline std::optional<Partition> find_n_partition(const Graph& g, std::size_t n) {
  std::optional<Partition> found;
  for_each_n_partition(g, n, [&](const Partition& p) {
    found = p;
    return false;
  });
  return found;
}

/// Returns the partition into classes of non-adjacency when the graph is complete
/// multipartite (non-adjacency transitive), otherwise nothing.
inline std::optional<Partition> is_complete_n_partite(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<int> cls(n, -1);
  Partition partition;
  for (std::size_t v = 0; v < n; ++v) {
    if (cls[v] >= 0) continue;
    std::vector<int> part{static_cast<int>(v)};
    for (std::size_t u = v + 1; u < n; ++u)
      if (!g.adjacent(static_cast<int>(v), static_cast<int>(u))) part.push_back(static_cast<int>(u));
    for (int u : part) {
      if (cls[u] >= 0) return std::nullopt;
      cls[u] = static_cast<int>(partition.parts.size());
    }
    partition.parts.push_back(std::move(part));
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      bool same = cls[a] == cls[b];
      if (same == g.adjacent(static_cast<int>(a), static_cast<int>(b))) return std::nullopt;
    }
  return partition;
}

// ---------------------------------------------------------------------------
// Independence number
// ---------------------------------------------------------------------------

namespace detail {

// Maximum clique by branch and bound with greedy colouring bounds (bit-parallel, n <= 64).
class MaxCliqueSearch {
 public:
  explicit MaxCliqueSearch(std::vector<std::uint64_t> adjacency) : adj_(std::move(adjacency)) {}

  int run() {
    std::uint64_t all = adj_.size() == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << adj_.size()) - 1);
    if (adj_.empty()) return 0;
    expand(all, 0);
    return best_;
  }

 private:
  void expand(std::uint64_t candidates, int size) {
    if (candidates == 0) {
      best_ = std::max(best_, size);
      return;
    }
    std::vector<int> order;
    std::vector<int> bound;
    std::uint64_t uncolored = candidates;
    int color = 0;
    while (uncolored) {
      ++color;
      std::uint64_t available = uncolored;
      while (available) {
        int v = std::countr_zero(available);
        std::uint64_t bit = std::uint64_t{1} << v;
        available &= ~bit;
        available &= ~adj_[v];
        uncolored &= ~bit;
        order.push_back(v);
        bound.push_back(color);
      }
    }
    for (int i = static_cast<int>(order.size()) - 1; i >= 0; --i) {
      if (size + bound[i] <= best_) return;
      int v = order[i];
      expand(candidates & adj_[v], size + 1);
      candidates &= ~(std::uint64_t{1} << v);
    }
  }

  std::vector<std::uint64_t> adj_;
  int best_ = 0;
};

}  // namespace detail

/// Exact independence number. Vertices are explored in order of descending degree in the
/// complement graph, where the search looks for a maximum clique.
inline int independence_number(const Graph& g, std::size_t size_limit = 64) {
  if (size_limit > 64) size_limit = 64;
  if (g.size() > size_limit)
    throw Error(Errc::SizeLimitExceeded,
                std::to_string(g.size()) + " vertices exceeds the limit of " + std::to_string(size_limit));
  const Graph comp = g.complement();
  std::vector<int> order(g.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return comp.degree(a) > comp.degree(b); });
  std::vector<std::uint64_t> adj(g.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = 0; j < order.size(); ++j)
      if (i != j && comp.adjacent(order[i], order[j])) adj[i] |= std::uint64_t{1} << j;
  return detail::MaxCliqueSearch(std::move(adj)).run();
}

}  // namespace atlas
