#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "atlas/exact.hpp"
#include "atlas/parallel.hpp"
#include "atlas/scenario.hpp"

namespace atlas {

struct PolytopeOptions {
  /// Largest number of global outcome assignments that may be enumerated.
  std::uint64_t budget = std::uint64_t{1} << 24;
};

/// Number of global outcome assignments, saturating at UINT64_MAX.
inline std::uint64_t assignment_count(const Scenario& s) {
  std::uint64_t total = 1;
  for (const auto& m : s.measurements()) {
    auto k = static_cast<std::uint64_t>(m.outcomes.size());
    if (total > std::numeric_limits<std::uint64_t>::max() / k) return std::numeric_limits<std::uint64_t>::max();
    total *= k;
  }
  return total;
}

inline void check_budget(const Scenario& s, const PolytopeOptions& opts) {
  auto count = assignment_count(s);
  if (count > opts.budget)
    throw Error(Errc::BudgetExceeded, std::to_string(count) + " deterministic assignments exceed the budget of " +
                                          std::to_string(opts.budget));
}

/// Visits every global assignment (one outcome per measurement); the last measurement varies fastest.
template <class Fn>
void for_each_assignment(const Scenario& s, Fn&& fn) {
  std::vector<int> a(s.size(), 0);
  while (true) {
    fn(static_cast<const std::vector<int>&>(a));
    std::size_t k = a.size();
    while (k-- > 0) {
      if (++a[k] < s.outcome_count(static_cast<int>(k))) break;
      a[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) return;
  }
}

/// 0/1 polytope coordinates (concatenated context tables) of a deterministic assignment.
inline std::vector<std::uint8_t> vertex_coordinates(const Scenario& s, const std::vector<int>& assignment) {
  std::vector<std::uint8_t> coords(s.coordinate_count(), 0);
  std::vector<int> local;
  for (std::size_t c = 0; c < s.contexts().size(); ++c) {
    local.clear();
    for (int m : s.contexts()[c].members) local.push_back(assignment[static_cast<std::size_t>(m)]);
    coords[s.table_offset(c) + s.flat_index(c, local)] = 1;
  }
  return coords;
}

struct Vertex {
  std::vector<int> assignment;
  std::vector<std::uint8_t> coords;
};

/// Vertices of the non-contextual (local) polytope and its affine dimension.
struct PolytopeDescription {
  ScenarioPtr scenario;
  std::vector<Vertex> vertices;
  std::size_t dimension = 0;

  ExactBehavior vertex_behavior(std::size_t i) const {
    return deterministic_behavior<Rational>(scenario, vertices.at(i).assignment);
  }
};

/// One vertex per distinct deterministic behavior; assignments inducing identical coordinates
/// are merged (first assignment kept).
inline PolytopeDescription enumerate_vertices(const ScenarioPtr& s, const PolytopeOptions& opts = {}) {
  check_budget(*s, opts);
  PolytopeDescription desc;
  desc.scenario = s;
  std::unordered_set<std::string> seen;
  for_each_assignment(*s, [&](const std::vector<int>& a) {
    auto coords = vertex_coordinates(*s, a);
    std::string key(coords.begin(), coords.end());
    if (seen.insert(std::move(key)).second) desc.vertices.push_back({a, std::move(coords)});
  });
  std::vector<std::vector<std::uint8_t>> points;
  points.reserve(desc.vertices.size());
  for (const auto& v : desc.vertices) points.push_back(v.coords);
  desc.dimension = exact::affine_dimension(points);
  return desc;
}

inline std::size_t polytope_dimension(const ScenarioPtr& s, const PolytopeOptions& opts = {}) {
  return enumerate_vertices(s, opts).dimension;
}

// ---------------------------------------------------------------------------
// Classical bound
// ---------------------------------------------------------------------------

namespace detail {

// Depth-first maximization over global assignments. Terms are resolved at the level of
// their largest measurement index, so partial sums are shared between assignments.
template <class Value>
class AssignmentMaximizer {
 public:
  struct CompiledTerm {
    std::vector<std::pair<int, int>> required;  // (measurement, outcome)
    Value coef;
  };

  AssignmentMaximizer(const Scenario& s, std::vector<std::vector<CompiledTerm>> by_level)
      : scenario_(s), by_level_(std::move(by_level)) {}

  Value maximize_from(std::vector<int>& assignment, std::size_t level, Value partial) const {
    if (level == scenario_.size()) return partial;
    std::optional<Value> best;
    for (int a = 0; a < scenario_.outcome_count(static_cast<int>(level)); ++a) {
      assignment[level] = a;
      Value next = partial;
      for (const auto& t : by_level_[level]) {
        bool match = true;
        for (auto [m, o] : t.required)
          if (assignment[static_cast<std::size_t>(m)] != o) {
            match = false;
            break;
          }
        if (match) next += t.coef;
      }
      Value v = maximize_from(assignment, level + 1, next);
      if (!best || v > *best) best = v;
    }
    return *best;
  }

 private:
  const Scenario& scenario_;
  std::vector<std::vector<CompiledTerm>> by_level_;
};

template <class Value, class Convert>
Value maximize_assignments(const Inequality& ineq, Convert convert) {
  const auto& s = ineq.scenario();
  using Maximizer = AssignmentMaximizer<Value>;
  std::vector<std::vector<typename Maximizer::CompiledTerm>> by_level(s.size());
  for (const auto& t : ineq.terms()) {
    typename Maximizer::CompiledTerm ct;
    for (std::size_t k = 0; k < t.context.size(); ++k) ct.required.emplace_back(t.context[k], t.assignment[k]);
    ct.coef = convert(t.coef);
    by_level[static_cast<std::size_t>(t.context.back())].push_back(std::move(ct));
  }
  Maximizer maximizer(s, std::move(by_level));
  if (s.size() == 0) return Value(0);
  // Split on the first measurement so the branches can run in parallel.
  const auto branches = static_cast<std::size_t>(s.outcome_count(0));
  std::vector<Value> results(branches);
  parallel_for(branches, [&](std::size_t a) {
    std::vector<int> assignment(s.size(), 0);
    assignment[0] = static_cast<int>(a);
    Value partial = Value(0);
    for (const auto& t : ineq.terms())
      if (t.context.size() == 1 && t.context[0] == 0 && t.assignment[0] == static_cast<int>(a)) partial += convert(t.coef);
    results[a] = maximizer.maximize_from(assignment, 1, partial);
  });
  Value best = results[0];
  for (const auto& v : results)
    if (v > best) best = v;
  return best;
}

}  // namespace detail

/// Exact maximum of the inequality over all deterministic (non-contextual / local) assignments.
inline Rational classical_bound(const Inequality& ineq, const PolytopeOptions& opts = {}) {
  const auto& s = ineq.scenario();
  check_budget(s, opts);
  std::vector<Rational> coefs;
  for (const auto& t : ineq.terms()) coefs.push_back(t.coef);
  BigInt scale = lcm_of_denominators(coefs);
  BigInt total = 0;
  for (const auto& c : coefs) total += abs(BigInt(boost::multiprecision::numerator(c) * (scale / boost::multiprecision::denominator(c))));
  if (total < BigInt(std::numeric_limits<std::int64_t>::max() / 2)) {
    auto scaled = detail::maximize_assignments<std::int64_t>(ineq, [&](const Rational& c) {
      BigInt v = boost::multiprecision::numerator(c) * (scale / boost::multiprecision::denominator(c));
      return v.convert_to<std::int64_t>();
    });
    return Rational(BigInt(scaled), scale);
  }
  return detail::maximize_assignments<Rational>(ineq, [](const Rational& c) { return c; });
}

// ---------------------------------------------------------------------------
// Membership
// ---------------------------------------------------------------------------

struct MembershipResult {
  bool member = false;
  /// Convex weights (vertex index, weight) when a member.
  std::vector<std::pair<std::size_t, Rational>> weights;
  /// Separating inequality when not a member: every vertex satisfies it, the behavior violates it.
  std::optional<Inequality> witness;
  /// witness value on the behavior minus its bound (positive for non-members).
  Rational violation = 0;
  /// Float-mode verdicts are approximate.
  bool approximate = false;
};

namespace detail {

inline Inequality witness_from_farkas(const PolytopeDescription& desc, const std::vector<Rational>& y) {
  const auto& s = *desc.scenario;
  std::vector<Term> terms;
  for (std::size_t c = 0; c < s.contexts().size(); ++c) {
    for (std::size_t idx = 0; idx < s.table_size(c); ++idx) {
      const auto& coef = y[s.table_offset(c) + idx];
      if (coef != 0) terms.push_back({s.contexts()[c].members, s.decode_index(c, idx), coef});
    }
  }
  Rational bound;
  bool first = true;
  for (const auto& v : desc.vertices) {
    Rational value = 0;
    for (std::size_t k = 0; k < v.coords.size(); ++k)
      if (v.coords[k]) value += y[k];
    if (first || value > bound) bound = value;
    first = false;
  }
  return Inequality(desc.scenario, std::move(terms), bound, BoundKind::NCHV, "separating witness");
}

inline MembershipResult exact_membership(const PolytopeDescription& desc, const std::vector<Rational>& point) {
  const auto& s = *desc.scenario;
  const std::size_t coords = s.coordinate_count();
  // Rows: one per coordinate plus the normalization of the weights.
  exact::Matrix a(coords + 1, std::vector<Rational>(desc.vertices.size(), Rational(0)));
  std::vector<Rational> b(coords + 1);
  for (std::size_t v = 0; v < desc.vertices.size(); ++v) {
    for (std::size_t k = 0; k < coords; ++k)
      if (desc.vertices[v].coords[k]) a[k][v] = 1;
    a[coords][v] = 1;
  }
  for (std::size_t k = 0; k < coords; ++k) b[k] = point[k];
  b[coords] = 1;

  MembershipResult result;
  std::vector<Rational> farkas;
  auto sel = exact::independent_rows(a, b);
  if (sel.inconsistency) {
    farkas = std::move(*sel.inconsistency);
  } else {
    exact::Matrix reduced;
    std::vector<Rational> reduced_b;
    for (auto r : sel.rows) {
      reduced.push_back(a[r]);
      reduced_b.push_back(b[r]);
    }
    auto lp = exact::solve_feasibility(reduced, reduced_b);
    if (lp.feasible) {
      result.member = true;
      for (std::size_t v = 0; v < lp.x.size(); ++v)
        if (lp.x[v] != 0) result.weights.emplace_back(v, lp.x[v]);
      return result;
    }
    farkas.assign(coords + 1, Rational(0));
    for (std::size_t i = 0; i < sel.rows.size(); ++i) farkas[sel.rows[i]] = lp.farkas[i];
  }
  // y^T [V;1] <= 0 and y^T [p;1] > 0, so sum_k y_k P_k <= -y_0 separates.
  farkas.resize(coords);
  result.witness = witness_from_farkas(desc, farkas);
  Rational value = 0;
  for (std::size_t k = 0; k < coords; ++k) value += farkas[k] * point[k];
  result.violation = value - result.witness->bound();
  return result;
}

}  // namespace detail

/// Exact membership of a behavior in the convex hull of deterministic assignments.
inline MembershipResult membership_test(const ExactBehavior& behavior, const PolytopeOptions& opts = {}) {
  const auto& s = behavior.scenario();
  if (!validate_behavior(s, behavior).valid())
    throw Error(Errc::NoDisturbanceViolated, "behavior is not normalized and no-disturbing");
  auto desc = enumerate_vertices(behavior.scenario_ptr(), opts);
  return detail::exact_membership(desc, behavior.flatten());
}

/// Approximate membership for float behaviors: entries are taken as exact rationals, and a
/// separating witness is accepted only if its (normalized) violation exceeds `tol`.
inline MembershipResult membership_test(const FloatBehavior& behavior, double tol, const PolytopeOptions& opts = {}) {
  const auto& s = behavior.scenario();
  if (!validate_behavior(s, behavior, tol).valid())
    throw Error(Errc::NoDisturbanceViolated, "behavior is not normalized and no-disturbing within tolerance");
  auto desc = enumerate_vertices(behavior.scenario_ptr(), opts);
  auto exact_point = to_exact(behavior).flatten();
  auto result = detail::exact_membership(desc, exact_point);
  result.approximate = true;
  if (!result.member) {
    Rational scale = 0;
    for (const auto& t : result.witness->terms()) scale = std::max<Rational>(scale, abs(t.coef));
    if (scale > 0 && to_double(result.violation / scale) <= tol) {
      result.member = true;
      result.witness.reset();
      result.violation = 0;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Tightness
// ---------------------------------------------------------------------------

enum class Verdict { Facet, LowerDimensionalFace, NotSupporting, ViolatedByVertex };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Facet: return "facet";
    case Verdict::LowerDimensionalFace: return "lower-dimensional face";
    case Verdict::NotSupporting: return "not supporting";
    case Verdict::ViolatedByVertex: return "violated-by-vertex";
  }
  return "unknown";
}

struct TightnessReport {
  Rational classical_bound;
  Rational stored_bound;
  std::size_t saturating_vertices = 0;
  /// Affine dimension of the saturating face, -1 when no vertex saturates the bound.
  long face_dimension = -1;
  std::size_t polytope_dimension = 0;
  Verdict verdict = Verdict::NotSupporting;

  friend bool operator==(const TightnessReport&, const TightnessReport&) = default;
};

inline TightnessReport tightness_test(const Inequality& ineq, const PolytopeDescription& desc) {
  if (!same_scenario(ineq.scenario_ptr(), desc.scenario))
    throw Error(Errc::ScenarioMismatch, "inequality and polytope belong to different scenarios");
  TightnessReport report;
  report.stored_bound = ineq.bound();
  report.polytope_dimension = desc.dimension;
  std::vector<std::vector<std::uint8_t>> saturating;
  bool first = true;
  for (const auto& v : desc.vertices) {
    Rational value = evaluate_assignment(ineq, v.assignment);
    if (first || value > report.classical_bound) report.classical_bound = value;
    first = false;
    if (value == ineq.bound()) saturating.push_back(v.coords);
  }
  report.saturating_vertices = saturating.size();
  if (!saturating.empty()) report.face_dimension = static_cast<long>(exact::affine_dimension(saturating));
  if (report.classical_bound > ineq.bound())
    report.verdict = Verdict::ViolatedByVertex;
  else if (saturating.empty() || report.face_dimension == static_cast<long>(desc.dimension))
    report.verdict = Verdict::NotSupporting;
  else if (report.face_dimension + 1 == static_cast<long>(desc.dimension))
    report.verdict = Verdict::Facet;
  else
    report.verdict = Verdict::LowerDimensionalFace;
  return report;
}

/// Facet test with exact arithmetic: saturating face dimension against polytope dimension.
inline TightnessReport tightness_test(const Inequality& ineq, const PolytopeOptions& opts = {}) {
  return tightness_test(ineq, enumerate_vertices(ineq.scenario_ptr(), opts));
}

}  // namespace atlas
