#pragma once

#include <cctype>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "atlas/polytope.hpp"
#include "atlas/seesaw.hpp"
#include "atlas/sic.hpp"

namespace atlas {

enum class ConnectionClass { OneToOne, Partial, GenericLift };

inline std::string to_string(ConnectionClass c) {
  switch (c) {
    case ConnectionClass::OneToOne: return "one-to-one";
    case ConnectionClass::Partial: return "partial";
    case ConnectionClass::GenericLift: return "generic-lift";
  }
  return "unknown";
}

struct QuantumEstimate {
  double value = 0;
  std::string method;
};

struct MapOptions {
  std::optional<Partition> partition;
  /// Local dimension for seesaw estimates of the quantum values; none skips them.
  std::optional<Eigen::Index> dimension;
  SeesawOptions seesaw;
  PolytopeOptions polytope;
};

struct MappingReport {
  MappingReport(std::string arrow_name, Inequality source_inequality)
      : arrow(std::move(arrow_name)), source_scenario(source_inequality.scenario_ptr()), source(std::move(source_inequality)) {}

  std::string arrow;
  ScenarioPtr source_scenario;
  Inequality source;
  std::optional<Inequality> target;
  std::optional<Partition> partition;
  /// Party-local label of every source measurement.
  std::vector<std::string> labels;
  Rational source_bound = 0;
  std::optional<Rational> target_bound;
  bool bound_preserved = false;
  TightnessReport source_tightness;
  std::optional<TightnessReport> target_tightness;
  /// preserved, lost, gained, changed or n/a.
  std::string tightness_change = "n/a";
  std::optional<QuantumEstimate> source_quantum;
  std::optional<QuantumEstimate> target_quantum;
  ConnectionClass connection = ConnectionClass::GenericLift;
  std::vector<std::string> notes;
};

namespace detail {

inline std::string party_name(std::size_t p) {
  if (p < 26) return std::string(1, static_cast<char>('A' + p));
  return "P" + std::to_string(p + 1);
}

inline std::string numeric_suffix(const std::string& id) {
  std::size_t k = id.size();
  while (k > 0 && std::isdigit(static_cast<unsigned char>(id[k - 1]))) --k;
  return id.substr(k);
}

// Party letter plus the id's numeric suffix (M3 -> A3); falls back to the position within the
// part when suffixes are missing or collide.
inline std::vector<std::string> party_labels(const Scenario& s, const Partition& partition) {
  std::vector<std::string> labels(s.size());
  bool suffixes = true;
  std::set<std::string> seen;
  for (std::size_t p = 0; p < partition.parts.size(); ++p)
    for (int m : partition.parts[p]) {
      auto suffix = numeric_suffix(s.measurement(m).id);
      labels[m] = party_name(p) + suffix;
      if (suffix.empty() || !seen.insert(labels[m]).second) suffixes = false;
    }
  if (!suffixes)
    for (std::size_t p = 0; p < partition.parts.size(); ++p)
      for (std::size_t k = 0; k < partition.parts[p].size(); ++k)
        labels[partition.parts[p][k]] = party_name(p) + std::to_string(k + 1);
  return labels;
}

inline std::vector<Edge> multipartite_closure(std::size_t n, const Partition& partition) {
  auto owner = partition.part_of(n);
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (owner[a] != owner[b]) edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
  return edges;
}

inline std::string tightness_change(const TightnessReport& before, const TightnessReport& after) {
  if (before.verdict == after.verdict) return "preserved";
  if (before.verdict == Verdict::Facet) return "lost";
  if (after.verdict == Verdict::Facet) return "gained";
  return "changed";
}

inline TightnessReport recheck(const Inequality& ineq, Rational& bound, const PolytopeOptions& opts) {
  bound = classical_bound(ineq, opts);
  return tightness_test(ineq.with_bound(bound), opts);
}

inline std::optional<QuantumEstimate> quantum_estimate(const Inequality& ineq, const MapOptions& opts) {
  if (!opts.dimension || !ineq.scenario().all_dichotomic()) return std::nullopt;
  auto seesaw = opts.seesaw;
  seesaw.local_dimension = *opts.dimension;
  auto r = seesaw_max(ineq, seesaw);
  return QuantumEstimate{r.value, "seesaw lower bound (d=" + std::to_string(seesaw.local_dimension) + " per party, " +
                                      std::to_string(seesaw.restarts) + " restarts, seed " +
                                      std::to_string(seesaw.seed) + ")"};
}

}  // namespace detail

/// Partition of a Bell scenario: complete multipartite, at least two parts of at least two.
inline std::optional<Partition> bell_partition(const Scenario& s) {
  auto p = is_complete_n_partite(s.compat());
  if (!p || p->parts.size() < 2 || !p->undersized().empty()) return std::nullopt;
  return p;
}

/// Bell -> KS: the same scenario and terms read as a non-contextuality inequality.
inline MappingReport bell_to_ks(const Inequality& ineq, const PolytopeOptions& opts = {}) {
  const auto& s = ineq.scenario();
  auto partition = bell_partition(s);
  if (!partition)
    throw Error(Errc::NotABellScenario, "compatibility graph is not complete n-partite with n >= 2 and parts of size >= 2");
  MappingReport report("bell-to-ks", ineq);
  report.partition = partition;
  report.labels = detail::party_labels(s, *partition);
  report.source_tightness = detail::recheck(ineq, report.source_bound, opts);
  Rational target_bound;
  auto target = ineq.with_kind(BoundKind::NCHV);
  report.target_tightness = detail::recheck(target, target_bound, opts);
  report.target = target.with_bound(target_bound);
  report.target_bound = target_bound;
  report.bound_preserved = target_bound == report.source_bound;
  report.tightness_change = detail::tightness_change(report.source_tightness, *report.target_tightness);
  report.connection = ConnectionClass::OneToOne;
  return report;
}

/// KS -> Bell: parts become parties, the compatibility graph is closed to the complete
/// multipartite graph over the parts, measurement ids are relabelled party-locally and the
/// bound and tightness are recomputed on the Bell polytope.
inline MappingReport ks_to_bell(const Inequality& ineq, const Partition& partition, const PolytopeOptions& opts = {}) {
  const auto& s = ineq.scenario();
  if (!is_valid_partition(s.compat(), partition))
    throw Error(Errc::InvalidPartition, "parts must cover every measurement once and hold no compatible pair");
  if (partition.parts.size() < 2) throw Error(Errc::InvalidPartition, "a Bell scenario needs at least two parties");
  if (!partition.undersized().empty())
    throw Error(Errc::UndersizedPart, "part " + std::to_string(partition.undersized().front()) +
                                          " has fewer than two measurements");
  auto labels = detail::party_labels(s, partition);
  std::vector<Measurement> ms;
  for (std::size_t i = 0; i < s.size(); ++i) ms.push_back({labels[i], s.measurement(static_cast<int>(i)).outcomes});
  auto closure = detail::multipartite_closure(s.size(), partition);
  auto target_scenario = make_scenario(std::move(ms), closure);

  MappingReport report("ks-to-bell", ineq);
  report.partition = partition;
  report.labels = labels;
  report.source_tightness = detail::recheck(ineq, report.source_bound, opts);
  Rational target_bound;
  auto target = ineq.with_scenario(target_scenario).with_kind(BoundKind::LR);
  report.target_tightness = detail::recheck(target, target_bound, opts);
  report.target = target.with_bound(target_bound);
  report.target_bound = target_bound;
  report.bound_preserved = target_bound == report.source_bound;
  report.tightness_change = detail::tightness_change(report.source_tightness, *report.target_tightness);
  report.connection = s.compat() == target_scenario->compat() ? ConnectionClass::OneToOne : ConnectionClass::Partial;
  if (report.connection == ConnectionClass::Partial)
    report.notes.push_back("the target adds compatibilities between parties; the quantum value of the source "
                           "inequality need not be attainable in the Bell scenario");
  return report;
}

/// Smallest n >= 2 admitting a partition into independent parts of size >= 2; the
/// lexicographically smallest such partition.
inline std::optional<Partition> smallest_bell_partition(const Graph& g) {
  for (std::size_t n = 2; 2 * n <= g.size(); ++n) {
    std::optional<Partition> found;
    for_each_n_partition(g, n, [&](const Partition& p) {
      if (!p.undersized().empty()) return true;
      found = p;
      return false;
    });
    if (found) return found;
  }
  return std::nullopt;
}

/// Runs the applicable arrow of the Bell/KS map and classifies the connection.
inline MappingReport map_report(const Inequality& ineq, const MapOptions& opts = {}) {
  const auto& s = ineq.scenario();
  MappingReport report("sic-lift-only", ineq);
  if (opts.partition) {
    report = ks_to_bell(ineq, *opts.partition, opts.polytope);
  } else if (bell_partition(s) && ineq.kind() == BoundKind::LR) {
    report = bell_to_ks(ineq, opts.polytope);
  } else if (auto p = bell_partition(s) ? bell_partition(s) : smallest_bell_partition(s.compat())) {
    report = ks_to_bell(ineq, *p, opts.polytope);
  } else {
    report.source_tightness = detail::recheck(ineq, report.source_bound, opts.polytope);
    report.connection = ConnectionClass::GenericLift;
    report.notes.push_back("no partition into at least two independent parts of size >= 2 exists; only the "
                           "generic lift through a SIC set applies");
  }
  report.source_quantum = detail::quantum_estimate(ineq.with_bound(report.source_bound), opts);
  if (report.target) report.target_quantum = detail::quantum_estimate(*report.target, opts);
  return report;
}

// ---------------------------------------------------------------------------
// Canned examples
// ---------------------------------------------------------------------------

struct NCycle {
  ScenarioPtr scenario;
  Inequality inequality;
};

/// n dichotomic measurements on the cycle C_n with sum_{i<n} <M_i M_{i+1}> - <M_n M_1>.
inline NCycle n_cycle(std::size_t n) {
  if (n < 4) throw Error(Errc::TooSmall, "n-cycle inequalities need n >= 4");
  std::vector<Measurement> ms;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    ms.push_back(dichotomic("M" + std::to_string(i + 1)));
    edges.emplace_back(static_cast<int>(i), static_cast<int>((i + 1) % n));
  }
  auto s = make_scenario(std::move(ms), edges);
  std::vector<Term> terms;
  for (std::size_t i = 0; i + 1 < n; ++i) add_correlator(terms, *s, {static_cast<int>(i), static_cast<int>(i + 1)}, 1);
  add_correlator(terms, *s, {static_cast<int>(n - 1), 0}, -1);
  Inequality ineq(s, std::move(terms), 0, BoundKind::NCHV, std::to_string(n) + "-cycle");
  return {s, ineq.with_bound(classical_bound(ineq))};
}

struct PearleHexagon {
  ScenarioPtr hexagon;
  Inequality gamma;
  Partition partition;
  ScenarioPtr bell;
  Inequality gamma_prime;
};

/// Hexagon scenario with gamma <= 4, the odd/even partition and the Bell inequality
/// gamma' = A1B2 + A3B2 + A3B4 + A5B4 + A5B6 - A1B6 <= 4 on the 3 x 3 setting scenario.
inline PearleHexagon pearle_hexagon() {
  auto cycle = n_cycle(6);
  Partition partition{{{0, 2, 4}, {1, 3, 5}}};
  std::vector<Measurement> ms;
  for (int i = 1; i <= 6; ++i) ms.push_back(dichotomic((i % 2 ? "A" : "B") + std::to_string(i)));
  auto bell = make_scenario(std::move(ms), detail::multipartite_closure(6, partition));
  std::vector<Term> terms;
  const int pairs[6][2] = {{0, 1}, {2, 1}, {2, 3}, {4, 3}, {4, 5}, {0, 5}};
  for (int k = 0; k < 6; ++k) add_correlator(terms, *bell, {pairs[k][0], pairs[k][1]}, k == 5 ? -1 : 1);
  Inequality gamma_prime(bell, std::move(terms), 4, BoundKind::LR, "gamma'");
  return {cycle.scenario, cycle.inequality.with_bound(4).with_label("gamma"), partition, bell, gamma_prime};
}

/// CHSH: A1B1 + A1B2 + A2B1 - A2B2 <= 2 on two parties with two dichotomic settings each.
inline NCycle chsh() {
  std::vector<Measurement> ms{dichotomic("A1"), dichotomic("A2"), dichotomic("B1"), dichotomic("B2")};
  auto s = make_scenario(std::move(ms), {{0, 2}, {0, 3}, {1, 2}, {1, 3}});
  std::vector<Term> terms;
  add_correlator(terms, *s, {0, 2}, 1);
  add_correlator(terms, *s, {0, 3}, 1);
  add_correlator(terms, *s, {1, 2}, 1);
  add_correlator(terms, *s, {1, 3}, -1);
  return {s, Inequality(s, std::move(terms), 2, BoundKind::LR, "CHSH")};
}

// ---------------------------------------------------------------------------
// SIC set -> bipartite Bell inequality
// ---------------------------------------------------------------------------

struct SicBellExpression {
  ScenarioPtr scenario;
  Inequality inequality;
  /// Maximally entangled two-qudit state with Alice's joint context projectors and Bob's
  /// transposed single-observable projectors.
  QuantumModel model;
};

struct SicRemoval {
  std::string id;
  Rational local_bound;
  double quantum_value = 0;
  double violation = 0;
};

struct SicBellReport {
  ScenarioPtr scenario;
  Inequality inequality;
  Rational local_bound;
  Rational mu;
  bool local_bound_mismatch = false;
  double quantum_value = 0;
  double violation = 0;
  std::vector<SicRemoval> removals;
};

namespace detail {

// Alice measures the joint PVM of a witness context (outcomes: the nonzero joint
// projectors), Bob a single element of the set. The witness sits on Alice's marginals; every
// disagreement between Alice's outcome for x and Bob's outcome for x costs the spread of the
// witness on that context. On |Phi> perfect correlations make the penalties vanish and the
// value is Tr(W)/d.
inline SicBellExpression sic_bell_expression(const SICSet& set) {
  const auto& s = set.scenario();
  const auto d = set.d;
  std::vector<std::size_t> settings;
  std::vector<std::size_t> owner;
  for (const auto& t : set.witness.terms()) {
    auto c = s.container_of(t.context);
    owner.push_back(*c);
    if (std::find(settings.begin(), settings.end(), *c) == settings.end()) settings.push_back(*c);
  }
  std::sort(settings.begin(), settings.end());

  struct AliceSetting {
    std::vector<int> members;
    std::vector<std::vector<int>> outcomes;
    std::vector<CMatrix> projectors;
    std::vector<Rational> witness;
    Rational spread;
  };
  std::vector<AliceSetting> alice;
  for (auto c : settings) {
    AliceSetting a;
    a.members = s.contexts()[c].members;
    Rational hi, lo;
    for (std::size_t idx = 0; idx < s.table_size(c); ++idx) {
      auto tuple = s.decode_index(c, idx);
      Rational value = 0;
      for (std::size_t k = 0; k < set.witness.terms().size(); ++k) {
        if (owner[k] != c) continue;
        const auto& t = set.witness.terms()[k];
        bool match = true;
        for (std::size_t j = 0; j < t.context.size() && match; ++j) {
          auto pos = std::find(a.members.begin(), a.members.end(), t.context[j]) - a.members.begin();
          match = tuple[static_cast<std::size_t>(pos)] == t.assignment[j];
        }
        if (match) value += t.coef;
      }
      if (idx == 0 || value > hi) hi = value;
      if (idx == 0 || value < lo) lo = value;
      CMatrix proj = CMatrix::Identity(d, d);
      for (std::size_t k = 0; k < a.members.size(); ++k) proj = proj * set.measurements[a.members[k]].effects[tuple[k]];
      if (proj.trace().real() > 0.5) {
        a.outcomes.push_back(tuple);
        a.projectors.push_back(linalg::hermitian_part(proj));
        a.witness.push_back(value);
      }
    }
    a.spread = hi - lo;
    alice.push_back(std::move(a));
  }

  std::vector<Measurement> ms;
  for (const auto& a : alice) {
    Measurement m{"A:" + s.context_key(a.members), {}};
    for (const auto& tuple : a.outcomes) {
      std::string label;
      for (std::size_t k = 0; k < tuple.size(); ++k) {
        if (k) label += '/';
        label += s.measurement(a.members[k]).outcomes[tuple[k]];
      }
      m.outcomes.push_back(label);
    }
    if (m.outcomes.size() < 2) throw Error(Errc::InvalidSet, "context '" + s.context_key(a.members) + "' has a single joint outcome");
    ms.push_back(std::move(m));
  }
  const int bob0 = static_cast<int>(alice.size());
  for (const auto& m : s.measurements()) ms.push_back({"B:" + m.id, m.outcomes});
  std::vector<Edge> edges;
  for (int a = 0; a < bob0; ++a)
    for (std::size_t b = 0; b < s.size(); ++b) edges.emplace_back(a, bob0 + static_cast<int>(b));
  auto scenario = make_scenario(ms, edges);

  std::vector<Term> terms;
  for (std::size_t a = 0; a < alice.size(); ++a) {
    const auto& setting = alice[a];
    for (std::size_t o = 0; o < setting.outcomes.size(); ++o)
      if (setting.witness[o] != 0) terms.push_back({{static_cast<int>(a)}, {static_cast<int>(o)}, setting.witness[o]});
    if (setting.spread == 0) continue;
    for (std::size_t k = 0; k < setting.members.size(); ++k) {
      int x = setting.members[k];
      for (std::size_t o = 0; o < setting.outcomes.size(); ++o)
        for (int b = 0; b < s.outcome_count(x); ++b)
          if (b != setting.outcomes[o][k])
            terms.push_back({{static_cast<int>(a), bob0 + x}, {static_cast<int>(o), b}, Rational(-setting.spread)});
    }
  }
  Inequality ineq(scenario, std::move(terms), 0, BoundKind::LR, "SIC lift");

  CMatrix id = CMatrix::Identity(d, d);
  CVector phi = CVector::Zero(d * d);
  for (Eigen::Index i = 0; i < d; ++i) phi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<QuantumMeasurement> qms;
  for (std::size_t a = 0; a < alice.size(); ++a) {
    QuantumMeasurement qm{ms[a].id, {}, true};
    for (const auto& p : alice[a].projectors) qm.effects.push_back(linalg::kron(p, id));
    qms.push_back(std::move(qm));
  }
  for (std::size_t x = 0; x < s.size(); ++x) {
    QuantumMeasurement qm{ms[static_cast<std::size_t>(bob0) + x].id, {}, true};
    for (const auto& e : set.measurements[x].effects) qm.effects.push_back(linalg::kron(id, e.transpose()));
    qms.push_back(std::move(qm));
  }
  return {scenario, std::move(ineq), QuantumModel(phi, std::move(qms))};
}

}  // namespace detail

inline SicBellReport sic_to_bell(const SICSet& set, const PolytopeOptions& opts = {}) {
  if (set.d > 8) throw Error(Errc::DimensionTooLarge, "SIC lifts are limited to d <= 8");
  auto verdict = verify_sic(set, 100, 0, opts);
  if (!verdict.sic) throw Error(Errc::SicVerificationFailed, "the set does not violate its witness for every state");

  auto lift = [&](const SICSet& x, Rational& bound, double& value) {
    auto expr = detail::sic_bell_expression(x);
    bound = classical_bound(expr.inequality, opts);
    value = evaluate(expr.inequality, quantum_behavior(expr.model, expr.scenario));
    return expr;
  };
  Rational bound;
  double value = 0;
  auto expr = lift(set, bound, value);
  SicBellReport report{expr.scenario, expr.inequality.with_bound(bound), bound, verdict.mu_computed,
                       bound != verdict.mu_computed, value, value - to_double(bound), {}};
  for (const auto& id : set.embedded) {
    auto reduced = remove_element(set, id);
    SicRemoval removal;
    removal.id = id;
    lift(reduced, removal.local_bound, removal.quantum_value);
    removal.violation = removal.quantum_value - to_double(removal.local_bound);
    report.removals.push_back(std::move(removal));
  }
  return report;
}

}  // namespace atlas
