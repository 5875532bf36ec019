#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "atlas/polytope.hpp"
#include "atlas/quantum.hpp"

namespace atlas {

/// State-independent contextuality set: ideal measurements on C^d with a witness whose
/// non-contextual bound mu is violated by every state.
struct SICSet {
  Eigen::Index d = 0;
  /// One entry per scenario measurement, in scenario order.
  std::vector<QuantumMeasurement> measurements;
  Inequality witness;
  Rational mu;
  double q = 0;
  /// Ids of the embedded contextual subset.
  std::vector<std::string> embedded;

  const Scenario& scenario() const { return witness.scenario(); }
};

/// Throws InvalidSet unless the set is a consistent collection of PVMs on C^d, d >= 3.
inline void check_sic_set(const SICSet& set) {
  const auto& s = set.scenario();
  if (set.d < 3) throw Error(Errc::InvalidSet, "a SIC set needs dimension at least 3");
  if (set.measurements.size() != s.size())
    throw Error(Errc::InvalidSet, "one measurement is required per scenario measurement");
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& qm = set.measurements[i];
    const auto& m = s.measurement(static_cast<int>(i));
    if (qm.id != m.id) throw Error(Errc::InvalidSet, "measurement '" + qm.id + "' is out of scenario order");
    if (qm.effects.size() != m.outcomes.size())
      throw Error(Errc::InvalidSet, "measurement '" + qm.id + "' has the wrong number of effects");
    for (const auto& e : qm.effects)
      if (e.rows() != set.d || e.cols() != set.d) throw Error(Errc::InvalidSet, "effects of '" + qm.id + "' are not d x d");
    try {
      check_povm(qm.effects);
    } catch (const Error& e) {
      throw Error(Errc::InvalidSet, "'" + qm.id + "': " + e.what());
    }
    if (!is_projective(qm.effects)) throw Error(Errc::InvalidSet, "'" + qm.id + "' is not an ideal (projective) measurement");
  }
  for (auto [a, b] : s.compat().edges())
    for (const auto& ea : set.measurements[a].effects)
      for (const auto& eb : set.measurements[b].effects)
        if (!detail::commute(ea, eb, kQuantumTol))
          throw Error(Errc::InvalidSet, "compatible '" + set.measurements[a].id + "' and '" + set.measurements[b].id +
                                            "' do not commute");
  for (const auto& id : set.embedded)
    if (!s.contains(id)) throw Error(Errc::InvalidSet, "embedded element '" + id + "' is not in the set");
}

/// Product of the projectors of a term, in canonical member order.
inline CMatrix term_operator(const std::vector<QuantumMeasurement>& ms, const Term& t, Eigen::Index d) {
  CMatrix op = CMatrix::Identity(d, d);
  for (std::size_t k = 0; k < t.context.size(); ++k) op = op * ms[t.context[k]].effects[t.assignment[k]];
  return op;
}

/// Operator form W of the witness: sum of coef times the product of the term's projectors.
inline CMatrix witness_operator(const SICSet& set) {
  CMatrix w = CMatrix::Zero(set.d, set.d);
  for (const auto& t : set.witness.terms()) w += to_double(t.coef) * term_operator(set.measurements, t, set.d);
  return linalg::hermitian_part(w);
}

struct SicReport {
  /// Spectral norm of W - q I.
  double deviation = 0;
  double lambda_min = 0;
  double lambda_max = 0;
  /// Smallest witness value over the sampled pure states.
  double sample_min = 0;
  std::size_t samples = 0;
  Rational mu_stated;
  Rational mu_computed;
  double q = 0;
  bool state_independent = false;
  /// Every state violates the computed bound: lambda_min(W) > mu.
  bool sic = false;
};

inline SicReport verify_sic(const SICSet& set, std::size_t samples = 1000, std::uint64_t seed = 0,
                            const PolytopeOptions& opts = {}) {
  check_sic_set(set);
  SicReport report;
  CMatrix w = witness_operator(set);
  auto eig = linalg::eigh(w);
  report.lambda_min = eig.values(0);
  report.lambda_max = eig.values(eig.values.size() - 1);
  report.deviation = linalg::hermitian_norm(w - set.q * CMatrix::Identity(set.d, set.d));
  report.q = set.q;
  report.mu_stated = set.mu;
  report.mu_computed = classical_bound(set.witness, opts);
  report.state_independent = report.deviation <= 1e-9;
  std::mt19937_64 rng(seed);
  report.samples = samples;
  report.sample_min = report.lambda_max;
  for (std::size_t i = 0; i < samples; ++i) {
    CVector psi = linalg::random_state(set.d, rng);
    report.sample_min = std::min(report.sample_min, (psi.adjoint() * w * psi)(0, 0).real());
  }
  report.sic = report.lambda_min > to_double(report.mu_computed) + 1e-9;
  return report;
}

/// The set with measurement `id` deleted together with every witness term that uses it.
inline SICSet remove_element(const SICSet& set, const std::string& id) {
  const auto& s = set.scenario();
  if (!s.contains(id)) throw Error(Errc::InvalidSet, "'" + id + "' is not in the set");
  const int removed = s.index_of(id);
  auto remap = [&](int m) { return m > removed ? m - 1 : m; };
  std::vector<Measurement> ms;
  for (const auto& m : s.measurements())
    if (m.id != id) ms.push_back(m);
  std::vector<Edge> edges;
  for (auto [a, b] : s.compat().edges())
    if (a != removed && b != removed) edges.emplace_back(remap(a), remap(b));
  auto reduced = make_scenario(std::move(ms), edges);
  std::vector<Term> terms;
  for (const auto& t : set.witness.terms()) {
    if (std::find(t.context.begin(), t.context.end(), removed) != t.context.end()) continue;
    Term copy = t;
    for (int& m : copy.context) m = remap(m);
    terms.push_back(std::move(copy));
  }
  SICSet out{set.d, {}, Inequality(reduced, std::move(terms), 0, set.witness.kind(), set.witness.label()), 0, 0, {}};
  for (const auto& qm : set.measurements)
    if (qm.id != id) out.measurements.push_back(qm);
  for (const auto& e : set.embedded)
    if (e != id) out.embedded.push_back(e);
  out.mu = classical_bound(out.witness);
  out.witness = out.witness.with_bound(out.mu);
  // Reduced quantum value: the witness operator's expectation on the maximally mixed state.
  out.q = witness_operator(out).trace().real() / static_cast<double>(out.d);
  return out;
}

struct RemovalCheck {
  std::string id;
  SicReport report;
  bool breaks = false;
};

struct CriticalityReport {
  std::vector<RemovalCheck> removals;
  bool critical = false;
};

/// Critical iff deleting any single element destroys the SIC property.
inline CriticalityReport criticality_check(const SICSet& set, std::size_t samples = 1000, std::uint64_t seed = 0,
                                           const PolytopeOptions& opts = {}) {
  auto full = verify_sic(set, samples, seed, opts);
  if (!full.sic) throw Error(Errc::SicVerificationFailed, "the full set is not a SIC set");
  CriticalityReport report;
  report.critical = true;
  for (const auto& m : set.scenario().measurements()) {
    auto reduced = remove_element(set, m.id);
    RemovalCheck check{m.id, {}, true};
    if (reduced.d >= 3 && !reduced.measurements.empty()) {
      check.report = verify_sic(reduced, samples, seed, opts);
      check.breaks = !check.report.sic;
    }
    report.critical = report.critical && check.breaks;
    report.removals.push_back(std::move(check));
  }
  return report;
}

/// Peres-Mermin square: nine two-qubit observables M{row}{col}; rows and columns are the
/// contexts. Witness: sum of the row products plus the first two column products minus the
/// third, W = 6 I, non-contextual bound 4.
inline SICSet pm_square() {
  using linalg::kron;
  CMatrix i2 = CMatrix::Identity(2, 2);
  CMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  z << 1, 0, 0, -1;
  const CMatrix grid[3][3] = {{kron(x, i2), kron(i2, x), kron(x, x)},
                              {kron(i2, y), kron(y, i2), kron(y, y)},
                              {kron(x, y), kron(y, x), kron(z, z)}};
  std::vector<Measurement> ms;
  std::vector<QuantumMeasurement> qms;
  std::vector<std::string> ids;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      std::string id = "M" + std::to_string(r + 1) + std::to_string(c + 1);
      ms.push_back(dichotomic(id));
      qms.push_back({id, observable_effects(grid[r][c]), true});
      ids.push_back(id);
    }
  std::vector<Edge> edges;
  for (int a = 0; a < 9; ++a)
    for (int b = a + 1; b < 9; ++b)
      if (a / 3 == b / 3 || a % 3 == b % 3) edges.emplace_back(a, b);
  auto s = make_scenario(std::move(ms), edges);
  std::vector<Term> terms;
  for (int r = 0; r < 3; ++r) add_correlator(terms, *s, {3 * r, 3 * r + 1, 3 * r + 2}, 1);
  for (int c = 0; c < 3; ++c) add_correlator(terms, *s, {c, c + 3, c + 6}, c == 2 ? -1 : 1);
  Inequality witness(s, std::move(terms), 4, BoundKind::NCHV, "Peres-Mermin");
  return SICSet{4, std::move(qms), std::move(witness), 4, 6.0, std::move(ids)};
}

}  // namespace atlas
