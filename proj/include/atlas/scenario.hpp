#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "atlas/error.hpp"
#include "atlas/graph.hpp"
#include "atlas/rational.hpp"

namespace atlas {

struct Measurement {
  std::string id;
  std::vector<std::string> outcomes;

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

/// Two-outcome measurement with labels "+1" (index 0) and "-1" (index 1).
inline Measurement dichotomic(std::string id) { return {std::move(id), {"+1", "-1"}}; }

/// Value of a dichotomic outcome index in correlator expressions.
inline int outcome_sign(int outcome) { return outcome == 0 ? 1 : -1; }

/// A set of mutually compatible measurements, stored as sorted indices.
struct Context {
  std::vector<int> members;

  friend bool operator==(const Context&, const Context&) = default;
  friend auto operator<=>(const Context&, const Context&) = default;
};

/// Measurements, their outcome sets and the compatibility graph. Maximal contexts are the
/// maximal cliques of the graph, computed once at construction, in lexicographic order.
class Scenario {
 public:
  Scenario(std::vector<Measurement> measurements, const std::vector<Edge>& compat_edges)
      : measurements_(std::move(measurements)), compat_(measurements_.size(), compat_edges) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < measurements_.size(); ++i) {
      const auto& m = measurements_[i];
      if (!seen.insert(m.id).second) throw Error(Errc::DuplicateMeasurement, "measurement id '" + m.id + "' repeated");
      if (m.outcomes.size() < 2)
        throw Error(Errc::TooFewOutcomes, "measurement '" + m.id + "' needs at least 2 outcomes");
      std::set<std::string> labels(m.outcomes.begin(), m.outcomes.end());
      if (labels.size() != m.outcomes.size())
        throw Error(Errc::TooFewOutcomes, "measurement '" + m.id + "' has repeated outcome labels");
      index_.emplace(m.id, static_cast<int>(i));
    }
    for (auto& clique : maximal_cliques(compat_)) contexts_.push_back(Context{std::move(clique)});
    offsets_.reserve(contexts_.size() + 1);
    offsets_.push_back(0);
    for (std::size_t c = 0; c < contexts_.size(); ++c) offsets_.push_back(offsets_.back() + table_size(c));
  }

  std::size_t size() const { return measurements_.size(); }
  const std::vector<Measurement>& measurements() const { return measurements_; }
  const Measurement& measurement(int i) const { return measurements_.at(static_cast<std::size_t>(i)); }
  int outcome_count(int i) const { return static_cast<int>(measurements_.at(static_cast<std::size_t>(i)).outcomes.size()); }
  const Graph& compat() const { return compat_; }

  /// Maximal contexts in canonical order.
  const std::vector<Context>& contexts() const { return contexts_; }

  int index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error(Errc::UnknownMeasurement, "no measurement with id '" + id + "'");
    return it->second;
  }

  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  int outcome_index(int measurement, const std::string& label) const {
    const auto& outs = measurements_.at(static_cast<std::size_t>(measurement)).outcomes;
    auto it = std::find(outs.begin(), outs.end(), label);
    if (it == outs.end())
      throw Error(Errc::ParseError, "measurement '" + measurements_[measurement].id + "' has no outcome '" + label + "'");
    return static_cast<int>(it - outs.begin());
  }

  bool is_clique(const std::vector<int>& members) const {
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        if (members[a] == members[b] || !compat_.adjacent(members[a], members[b])) return false;
    return true;
  }

  /// First maximal context (canonical order) containing all of `members`.
  std::optional<std::size_t> container_of(const std::vector<int>& members) const {
    for (std::size_t c = 0; c < contexts_.size(); ++c) {
      const auto& cm = contexts_[c].members;
      if (std::all_of(members.begin(), members.end(),
                      [&](int m) { return std::binary_search(cm.begin(), cm.end(), m); }))
        return c;
    }
    return std::nullopt;
  }

  /// Number of joint outcomes of maximal context `c`.
  std::size_t table_size(std::size_t c) const {
    std::size_t size = 1;
    for (int m : contexts_.at(c).members) size *= static_cast<std::size_t>(outcome_count(m));
    return size;
  }

  /// Offset of context `c` in the concatenation of all context tables.
  std::size_t table_offset(std::size_t c) const { return offsets_.at(c); }
  std::size_t coordinate_count() const { return offsets_.back(); }

  /// Row-major index of a joint outcome (first member most significant).
  std::size_t flat_index(std::size_t c, const std::vector<int>& outcomes) const {
    std::size_t idx = 0;
    const auto& members = contexts_.at(c).members;
    for (std::size_t k = 0; k < members.size(); ++k)
      idx = idx * static_cast<std::size_t>(outcome_count(members[k])) + static_cast<std::size_t>(outcomes[k]);
    return idx;
  }

  std::vector<int> decode_index(std::size_t c, std::size_t idx) const {
    const auto& members = contexts_.at(c).members;
    std::vector<int> out(members.size());
    for (std::size_t k = members.size(); k-- > 0;) {
      auto base = static_cast<std::size_t>(outcome_count(members[k]));
      out[k] = static_cast<int>(idx % base);
      idx /= base;
    }
    return out;
  }

  /// Canonical context string: member ids joined by commas.
  std::string context_key(const std::vector<int>& members) const {
    std::string key;
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (k) key += ',';
      key += measurements_.at(static_cast<std::size_t>(members[k])).id;
    }
    return key;
  }

  bool all_dichotomic() const {
    return std::all_of(measurements_.begin(), measurements_.end(), [](const Measurement& m) { return m.outcomes.size() == 2; });
  }

  friend bool operator==(const Scenario& a, const Scenario& b) {
    return a.measurements_ == b.measurements_ && a.compat_ == b.compat_;
  }

 private:
  std::vector<Measurement> measurements_;
  Graph compat_;
  std::vector<Context> contexts_;
  std::vector<std::size_t> offsets_;
  std::unordered_map<std::string, int> index_;
};

using ScenarioPtr = std::shared_ptr<const Scenario>;

inline ScenarioPtr make_scenario(std::vector<Measurement> measurements, const std::vector<Edge>& compat_edges) {
  return std::make_shared<const Scenario>(std::move(measurements), compat_edges);
}

/// Builds a scenario from ids and outcome counts; outcomes are labelled "0", "1", ...
inline ScenarioPtr build_scenario(const std::vector<std::string>& ids, const std::vector<int>& outcome_counts,
                                  const std::vector<Edge>& compat_edges) {
  if (ids.size() != outcome_counts.size())
    throw Error(Errc::TooFewOutcomes, "one outcome count is required per measurement");
  std::vector<Measurement> ms;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (outcome_counts[i] < 2) throw Error(Errc::TooFewOutcomes, "measurement '" + ids[i] + "' needs at least 2 outcomes");
    Measurement m{ids[i], {}};
    for (int k = 0; k < outcome_counts[i]; ++k) m.outcomes.push_back(std::to_string(k));
    ms.push_back(std::move(m));
  }
  return make_scenario(std::move(ms), compat_edges);
}

inline bool same_scenario(const ScenarioPtr& a, const ScenarioPtr& b) { return a == b || (a && b && *a == *b); }

inline std::vector<Context> maximal_contexts(const Scenario& s) { return s.contexts(); }

// ---------------------------------------------------------------------------
// Behaviors
// ---------------------------------------------------------------------------

enum class NumericMode { Exact, Float };

template <class T>
constexpr NumericMode numeric_mode_of() {
  return std::is_same_v<T, Rational> ? NumericMode::Exact : NumericMode::Float;
}

/// Probability table per maximal context. `T` is Rational (exact mode) or double (float mode).
template <class T>
class Behavior {
 public:
  static constexpr NumericMode mode = numeric_mode_of<T>();

  Behavior(ScenarioPtr scenario, std::vector<std::vector<T>> tables)
      : scenario_(std::move(scenario)), tables_(std::move(tables)) {
    if (tables_.size() != scenario_->contexts().size())
      throw Error(Errc::MissingContextTable, "expected " + std::to_string(scenario_->contexts().size()) +
                                                 " context tables, got " + std::to_string(tables_.size()));
    for (std::size_t c = 0; c < tables_.size(); ++c)
      if (tables_[c].size() != scenario_->table_size(c))
        throw Error(Errc::MissingContextTable, "table for context '" +
                                                   scenario_->context_key(scenario_->contexts()[c].members) +
                                                   "' has the wrong number of entries");
  }

  const Scenario& scenario() const { return *scenario_; }
  const ScenarioPtr& scenario_ptr() const { return scenario_; }
  const std::vector<std::vector<T>>& tables() const { return tables_; }
  const std::vector<T>& table(std::size_t c) const { return tables_.at(c); }

  /// Marginal probability of `outcomes` on the sub-context `members` (any order), read from
  /// the first maximal context containing it.
  T marginal(const std::vector<int>& members, const std::vector<int>& outcomes) const {
    auto c = scenario_->container_of(members);
    if (!c) throw Error(Errc::ScenarioMismatch, "'" + scenario_->context_key(members) + "' is not a context");
    return marginal_in(*c, members, outcomes);
  }

  T marginal_in(std::size_t c, const std::vector<int>& members, const std::vector<int>& outcomes) const {
    const auto& cm = scenario_->contexts()[c].members;
    std::vector<int> position(members.size());
    for (std::size_t k = 0; k < members.size(); ++k)
      position[k] = static_cast<int>(std::lower_bound(cm.begin(), cm.end(), members[k]) - cm.begin());
    if (members.size() == cm.size()) {
      std::vector<int> full(cm.size());
      for (std::size_t k = 0; k < members.size(); ++k) full[position[k]] = outcomes[k];
      return tables_[c][scenario_->flat_index(c, full)];
    }
    T sum = T(0);
    const auto& table = tables_[c];
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      auto digits = scenario_->decode_index(c, idx);
      bool match = true;
      for (std::size_t k = 0; k < members.size() && match; ++k) match = digits[position[k]] == outcomes[k];
      if (match) sum += table[idx];
    }
    return sum;
  }

  /// Concatenation of all context tables (polytope coordinates).
  std::vector<T> flatten() const {
    std::vector<T> out;
    out.reserve(scenario_->coordinate_count());
    for (const auto& t : tables_) out.insert(out.end(), t.begin(), t.end());
    return out;
  }

 private:
  ScenarioPtr scenario_;
  std::vector<std::vector<T>> tables_;
};

using ExactBehavior = Behavior<Rational>;
using FloatBehavior = Behavior<double>;

template <class T>
Behavior<T> uniform_behavior(const ScenarioPtr& s) {
  std::vector<std::vector<T>> tables;
  for (std::size_t c = 0; c < s->contexts().size(); ++c) {
    auto size = s->table_size(c);
    tables.emplace_back(size, T(1) / T(static_cast<long>(size)));
  }
  return Behavior<T>(s, std::move(tables));
}

/// Behavior induced by one global outcome assignment (a vertex of the classical polytope).
template <class T>
Behavior<T> deterministic_behavior(const ScenarioPtr& s, const std::vector<int>& assignment) {
  std::vector<std::vector<T>> tables;
  for (std::size_t c = 0; c < s->contexts().size(); ++c) {
    std::vector<T> t(s->table_size(c), T(0));
    std::vector<int> local;
    for (int m : s->contexts()[c].members) local.push_back(assignment.at(static_cast<std::size_t>(m)));
    t[s->flat_index(c, local)] = T(1);
    tables.push_back(std::move(t));
  }
  return Behavior<T>(s, std::move(tables));
}

/// lambda * a + (1 - lambda) * b.
template <class T>
Behavior<T> mix(const T& lambda, const Behavior<T>& a, const Behavior<T>& b) {
  if (!same_scenario(a.scenario_ptr(), b.scenario_ptr()))
    throw Error(Errc::ScenarioMismatch, "behaviors belong to different scenarios");
  auto tables = a.tables();
  for (std::size_t c = 0; c < tables.size(); ++c)
    for (std::size_t k = 0; k < tables[c].size(); ++k)
      tables[c][k] = lambda * a.table(c)[k] + (T(1) - lambda) * b.table(c)[k];
  return Behavior<T>(a.scenario_ptr(), std::move(tables));
}

inline FloatBehavior to_float(const ExactBehavior& b) {
  std::vector<std::vector<double>> tables;
  for (const auto& t : b.tables()) {
    std::vector<double> row;
    for (const auto& v : t) row.push_back(to_double(v));
    tables.push_back(std::move(row));
  }
  return FloatBehavior(b.scenario_ptr(), std::move(tables));
}

inline ExactBehavior to_exact(const FloatBehavior& b) {
  std::vector<std::vector<Rational>> tables;
  for (const auto& t : b.tables()) {
    std::vector<Rational> row;
    for (double v : t) row.push_back(from_double(v));
    tables.push_back(std::move(row));
  }
  return ExactBehavior(b.scenario_ptr(), std::move(tables));
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct NormalizationIssue {
  std::size_t context;
  double sum;
};

struct DisturbanceIssue {
  std::size_t first;
  std::size_t second;
  std::vector<int> shared;
  double max_deviation;
};

struct ValidationReport {
  std::vector<NormalizationIssue> normalization;
  std::vector<DisturbanceIssue> disturbance;

  bool valid() const { return normalization.empty() && disturbance.empty(); }
};

/// Checks normalization and no-disturbance. Exact behaviors are compared exactly and `tol`
/// is ignored. Throws NegativeProbability on any entry below -tol (below 0 in exact mode).
template <class T>
ValidationReport validate_behavior(const Scenario& s, const Behavior<T>& b, double tol = 0.0) {
  constexpr bool exact = std::is_same_v<T, Rational>;
  if (!(b.scenario() == s)) throw Error(Errc::ScenarioMismatch, "behavior was built for another scenario");
  ValidationReport report;
  const auto& ctx = s.contexts();
  auto deviation = [](const T& x, const T& y) -> double {
    if constexpr (exact)
      return to_double(abs(Rational(x - y)));
    else
      return std::abs(x - y);
  };
  for (std::size_t c = 0; c < ctx.size(); ++c) {
    T sum = T(0);
    for (const auto& p : b.table(c)) {
      bool negative;
      if constexpr (exact)
        negative = p < 0;
      else
        negative = p < -tol || !std::isfinite(p);
      if (negative)
        throw Error(Errc::NegativeProbability, "negative entry in context '" + s.context_key(ctx[c].members) + "'");
      sum += p;
    }
    double dev = deviation(sum, T(1));
    if (exact ? sum != T(1) : dev > tol) {
      if constexpr (exact)
        report.normalization.push_back({c, to_double(sum)});
      else
        report.normalization.push_back({c, sum});
    }
  }
  for (std::size_t c1 = 0; c1 < ctx.size(); ++c1) {
    for (std::size_t c2 = c1 + 1; c2 < ctx.size(); ++c2) {
      std::vector<int> shared;
      std::set_intersection(ctx[c1].members.begin(), ctx[c1].members.end(), ctx[c2].members.begin(),
                            ctx[c2].members.end(), std::back_inserter(shared));
      if (shared.empty()) continue;
      std::vector<int> outcomes(shared.size(), 0);
      double worst = 0;
      bool differs = false;
      while (true) {
        T m1 = b.marginal_in(c1, shared, outcomes);
        T m2 = b.marginal_in(c2, shared, outcomes);
        worst = std::max(worst, deviation(m1, m2));
        if constexpr (exact) differs = differs || m1 != m2;
        std::size_t k = shared.size();
        while (k-- > 0) {
          if (++outcomes[k] < s.outcome_count(shared[k])) break;
          outcomes[k] = 0;
        }
        if (k == static_cast<std::size_t>(-1)) break;
      }
      if (exact ? differs : worst > tol) report.disturbance.push_back({c1, c2, shared, worst});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Inequalities
// ---------------------------------------------------------------------------

enum class BoundKind { NCHV, LR };

inline std::string to_string(BoundKind k) { return k == BoundKind::NCHV ? "NCHV" : "LR"; }

/// coef * P(assignment | context). The context is any clique of the compatibility graph.
struct Term {
  std::vector<int> context;
  std::vector<int> assignment;
  Rational coef;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Linear functional over behavior entries with a classical bound: sum_terms <= bound.
class Inequality {
 public:
  Inequality(ScenarioPtr scenario, std::vector<Term> terms, Rational bound, BoundKind kind, std::string label = {})
      : scenario_(std::move(scenario)), terms_(std::move(terms)), bound_(std::move(bound)), kind_(kind),
        label_(std::move(label)) {
    for (auto& t : terms_) canonicalize(t);
    // Sorted by (context, assignment) with repeated entries merged and zero coefficients dropped.
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
      return std::tie(a.context, a.assignment) < std::tie(b.context, b.assignment);
    });
    std::vector<Term> merged;
    for (auto& t : terms_) {
      if (!merged.empty() && merged.back().context == t.context && merged.back().assignment == t.assignment)
        merged.back().coef += t.coef;
      else
        merged.push_back(std::move(t));
    }
    std::erase_if(merged, [](const Term& t) { return t.coef == 0; });
    terms_ = std::move(merged);
  }

  const Scenario& scenario() const { return *scenario_; }
  const ScenarioPtr& scenario_ptr() const { return scenario_; }
  const std::vector<Term>& terms() const { return terms_; }
  const Rational& bound() const { return bound_; }
  BoundKind kind() const { return kind_; }
  const std::string& label() const { return label_; }

  Inequality with_bound(Rational bound) const {
    auto copy = *this;
    copy.bound_ = std::move(bound);
    return copy;
  }
  Inequality with_kind(BoundKind kind) const {
    auto copy = *this;
    copy.kind_ = kind;
    return copy;
  }
  Inequality with_scenario(ScenarioPtr s) const {
    return Inequality(std::move(s), terms_, bound_, kind_, label_);
  }
  Inequality with_label(std::string label) const {
    auto copy = *this;
    copy.label_ = std::move(label);
    return copy;
  }

  friend bool operator==(const Inequality& a, const Inequality& b) {
    return same_scenario(a.scenario_, b.scenario_) && a.terms_ == b.terms_ && a.bound_ == b.bound_ &&
           a.kind_ == b.kind_;
  }

 private:
  void canonicalize(Term& t) const {
    if (t.context.empty() || t.context.size() != t.assignment.size())
      throw Error(Errc::ParseError, "term needs a non-empty context with one outcome per member");
    std::vector<std::pair<int, int>> zipped;
    for (std::size_t k = 0; k < t.context.size(); ++k) {
      int m = t.context[k];
      if (m < 0 || static_cast<std::size_t>(m) >= scenario_->size())
        throw Error(Errc::UnknownMeasurement, "term references measurement index " + std::to_string(m));
      if (t.assignment[k] < 0 || t.assignment[k] >= scenario_->outcome_count(m))
        throw Error(Errc::ParseError, "outcome index out of range for '" + scenario_->measurement(m).id + "'");
      zipped.emplace_back(m, t.assignment[k]);
    }
    std::sort(zipped.begin(), zipped.end());
    for (std::size_t k = 0; k < zipped.size(); ++k) {
      t.context[k] = zipped[k].first;
      t.assignment[k] = zipped[k].second;
    }
    if (!scenario_->is_clique(t.context))
      throw Error(Errc::ScenarioMismatch, "term context '" + scenario_->context_key(t.context) +
                                              "' is not a set of compatible measurements");
  }

  ScenarioPtr scenario_;
  std::vector<Term> terms_;
  Rational bound_;
  BoundKind kind_;
  std::string label_;
};

/// Expands coef * <M_a M_b ...> for dichotomic measurements into outcome-assignment terms.
inline void add_correlator(std::vector<Term>& terms, const Scenario& s, const std::vector<int>& members,
                           const Rational& coef) {
  for (int m : members)
    if (s.outcome_count(m) != 2)
      throw Error(Errc::NotDichotomic, "correlator on non-dichotomic measurement '" + s.measurement(m).id + "'");
  const std::size_t k = members.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::vector<int> outcomes(k);
    int sign = 1;
    for (std::size_t j = 0; j < k; ++j) {
      outcomes[j] = static_cast<int>((mask >> (k - 1 - j)) & 1U);
      sign *= outcome_sign(outcomes[j]);
    }
    terms.push_back({members, outcomes, sign > 0 ? coef : Rational(-coef)});
  }
}

/// Sum of coef * P(assignment | context), exact for exact behaviors.
template <class T>
T evaluate(const Inequality& ineq, const Behavior<T>& b) {
  if (!same_scenario(ineq.scenario_ptr(), b.scenario_ptr()))
    throw Error(Errc::ScenarioMismatch, "inequality and behavior belong to different scenarios");
  T value = T(0);
  for (const auto& t : ineq.terms()) {
    T p = b.marginal(t.context, t.assignment);
    if constexpr (std::is_same_v<T, Rational>)
      value += t.coef * p;
    else
      value += to_double(t.coef) * p;
  }
  return value;
}

/// Value of the inequality on the deterministic behavior of a global assignment.
inline Rational evaluate_assignment(const Inequality& ineq, const std::vector<int>& assignment) {
  Rational value = 0;
  for (const auto& t : ineq.terms()) {
    bool match = true;
    for (std::size_t k = 0; k < t.context.size() && match; ++k)
      match = assignment[static_cast<std::size_t>(t.context[k])] == t.assignment[k];
    if (match) value += t.coef;
  }
  return value;
}

}  // namespace atlas
