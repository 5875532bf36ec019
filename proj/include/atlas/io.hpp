#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "atlas/bridge.hpp"
#include "atlas/exclusivity.hpp"
#include "atlas/theta.hpp"

namespace atlas::io {

using Json = nlohmann::json;

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(Errc::ParseError, path + ": " + e.what());
  }
}

namespace detail {

template <class T>
T get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(Errc::ParseError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(Errc::ParseError, std::string("field '") + key + "': " + e.what());
  }
}

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(Errc::ParseError, std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rationals, graphs, partitions
// ---------------------------------------------------------------------------

inline Json rational_to_json(const Rational& r) { return to_string(r); }

inline Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number()) return from_double(j.get<double>());
  throw Error(Errc::ParseError, "expected a rational as \"p/q\" or a number");
}

inline Json graph_to_json(const Graph& g) {
  Json edges = Json::array();
  for (auto [a, b] : g.edges()) edges.push_back({a, b});
  return {{"n", g.size()}, {"edges", edges}};
}

inline Graph graph_from_json(const Json& j) {
  auto n = detail::get<long long>(j, "n");
  if (n < 0) throw Error(Errc::ParseError, "vertex count must be nonnegative");
  std::vector<Edge> edges;
  for (const auto& e : detail::field(j, "edges")) {
    if (!e.is_array() || e.size() != 2) throw Error(Errc::ParseError, "edges are pairs [i, j]");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return Graph(static_cast<std::size_t>(n), edges);
}

/// Parts listed by measurement id.
inline Json partition_to_json(const Partition& p, const Scenario& s) {
  Json parts = Json::array();
  for (const auto& part : p.parts) {
    Json ids = Json::array();
    for (int m : part) ids.push_back(s.measurement(m).id);
    parts.push_back(ids);
  }
  return {{"parts", parts}};
}

inline Json partition_to_json(const Partition& p) { return {{"parts", p.parts}}; }

/// Parts given either as measurement ids or as 0-based indices.
inline Partition partition_from_json(const Json& j, const Scenario* s = nullptr) {
  Partition p;
  for (const auto& part : detail::field(j, "parts")) {
    std::vector<int> members;
    for (const auto& m : part) {
      if (m.is_string()) {
        if (!s) throw Error(Errc::ParseError, "partition by id needs a scenario");
        if (!s->contains(m.get<std::string>())) throw Error(Errc::InvalidPartition, "unknown measurement '" + m.get<std::string>() + "'");
        members.push_back(s->index_of(m.get<std::string>()));
      } else {
        members.push_back(m.get<int>());
      }
    }
    std::sort(members.begin(), members.end());
    p.parts.push_back(std::move(members));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Scenarios, behaviors, inequalities
// ---------------------------------------------------------------------------

inline Json scenario_to_json(const Scenario& s) {
  Json ms = Json::array();
  for (const auto& m : s.measurements()) ms.push_back({{"id", m.id}, {"outcomes", m.outcomes}});
  Json compat = Json::array();
  for (auto [a, b] : s.compat().edges()) compat.push_back({a, b});
  return {{"measurements", ms}, {"compat", compat}};
}

inline ScenarioPtr scenario_from_json(const Json& j) {
  std::vector<Measurement> ms;
  for (const auto& m : detail::field(j, "measurements"))
    ms.push_back({detail::get<std::string>(m, "id"), detail::get<std::vector<std::string>>(m, "outcomes")});
  std::vector<Edge> edges;
  for (const auto& e : detail::field(j, "compat")) {
    if (!e.is_array() || e.size() != 2) throw Error(Errc::ParseError, "compat entries are pairs [i, j]");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return make_scenario(std::move(ms), edges);
}

template <class T>
Json behavior_to_json(const Behavior<T>& b) {
  const auto& s = b.scenario();
  Json tables = Json::object();
  for (std::size_t c = 0; c < s.contexts().size(); ++c) {
    Json row = Json::array();
    for (const auto& v : b.table(c)) {
      if constexpr (std::is_same_v<T, Rational>)
        row.push_back(rational_to_json(v));
      else
        row.push_back(v);
    }
    tables[s.context_key(s.contexts()[c].members)] = row;
  }
  return {{"mode", std::is_same_v<T, Rational> ? "rational" : "float"}, {"tables", tables}};
}

using AnyBehavior = std::variant<ExactBehavior, FloatBehavior>;

inline AnyBehavior behavior_from_json(const Json& j, const ScenarioPtr& s) {
  auto mode = j.contains("mode") ? detail::get<std::string>(j, "mode") : std::string("rational");
  if (mode != "rational" && mode != "float") throw Error(Errc::ParseError, "mode must be 'rational' or 'float'");
  const auto& tables = detail::field(j, "tables");
  std::vector<std::vector<Rational>> exact;
  std::vector<std::vector<double>> approx;
  for (std::size_t c = 0; c < s->contexts().size(); ++c) {
    auto key = s->context_key(s->contexts()[c].members);
    if (!tables.contains(key)) throw Error(Errc::MissingContextTable, "no table for context '" + key + "'");
    const auto& row = tables.at(key);
    if (!row.is_array()) throw Error(Errc::ParseError, "table '" + key + "' must be an array");
    if (mode == "rational") {
      std::vector<Rational> v;
      for (const auto& x : row) v.push_back(rational_from_json(x));
      exact.push_back(std::move(v));
    } else {
      std::vector<double> v;
      for (const auto& x : row) {
        if (!x.is_number()) throw Error(Errc::ParseError, "float tables hold numbers");
        v.push_back(x.get<double>());
      }
      approx.push_back(std::move(v));
    }
  }
  if (tables.size() != s->contexts().size())
    throw Error(Errc::ScenarioMismatch, "behavior has tables for contexts that are not maximal contexts of the scenario");
  if (mode == "rational") return ExactBehavior(s, std::move(exact));
  return FloatBehavior(s, std::move(approx));
}

inline Json inequality_to_json(const Inequality& ineq) {
  const auto& s = ineq.scenario();
  Json terms = Json::array();
  for (const auto& t : ineq.terms()) {
    Json ctx = Json::array(), asg = Json::array();
    for (std::size_t k = 0; k < t.context.size(); ++k) {
      const auto& m = s.measurement(t.context[k]);
      ctx.push_back(m.id);
      asg.push_back(m.outcomes[t.assignment[k]]);
    }
    terms.push_back({{"context", ctx}, {"assignment", asg}, {"coef", rational_to_json(t.coef)}});
  }
  Json j = {{"terms", terms}, {"bound", rational_to_json(ineq.bound())}, {"kind", to_string(ineq.kind())}};
  if (!ineq.label().empty()) j["label"] = ineq.label();
  return j;
}

inline Inequality inequality_from_json(const Json& j, const ScenarioPtr& s) {
  std::vector<Term> terms;
  for (const auto& t : detail::field(j, "terms")) {
    auto ctx = detail::get<std::vector<std::string>>(t, "context");
    auto asg = detail::get<std::vector<std::string>>(t, "assignment");
    if (ctx.size() != asg.size()) throw Error(Errc::ParseError, "context and assignment lengths differ");
    Term term;
    for (std::size_t k = 0; k < ctx.size(); ++k) {
      if (!s->contains(ctx[k])) throw Error(Errc::UnknownMeasurement, "term references unknown measurement '" + ctx[k] + "'");
      int m = s->index_of(ctx[k]);
      term.context.push_back(m);
      term.assignment.push_back(s->outcome_index(m, asg[k]));
    }
    term.coef = rational_from_json(detail::field(t, "coef"));
    terms.push_back(std::move(term));
  }
  Rational bound = j.contains("bound") ? rational_from_json(j.at("bound")) : Rational(0);
  auto kind_name = j.contains("kind") ? detail::get<std::string>(j, "kind") : std::string("NCHV");
  if (kind_name != "NCHV" && kind_name != "LR") throw Error(Errc::ParseError, "kind must be 'NCHV' or 'LR'");
  auto label = j.contains("label") ? detail::get<std::string>(j, "label") : std::string();
  return Inequality(s, std::move(terms), bound, kind_name == "LR" ? BoundKind::LR : BoundKind::NCHV, label);
}

// ---------------------------------------------------------------------------
// Complex matrices and quantum models
// ---------------------------------------------------------------------------

inline Json complex_to_json(const Complex& z) { return {z.real(), z.imag()}; }

inline Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(Errc::ParseError, "complex entries are [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

inline CMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(Errc::ParseError, "matrices are non-empty arrays of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols)
      throw Error(Errc::ParseError, "matrix rows have different lengths");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[i][k]);
  }
  return m;
}

inline Json vector_to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

inline CVector vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(Errc::ParseError, "state vectors are non-empty arrays");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

inline Json measurement_to_json(const QuantumMeasurement& m) {
  Json effects = Json::array();
  for (const auto& e : m.effects) effects.push_back(matrix_to_json(e));
  return {{"id", m.id}, {"effects", effects}, {"pvm", m.pvm}};
}

inline std::vector<CMatrix> effects_from_json(const Json& j) {
  std::vector<CMatrix> effects;
  for (const auto& e : detail::field(j, "effects")) effects.push_back(matrix_from_json(e));
  return effects;
}

inline QuantumMeasurement measurement_from_json(const Json& j) {
  return {detail::get<std::string>(j, "id"), effects_from_json(j), j.contains("pvm") ? detail::get<bool>(j, "pvm") : false};
}

inline Json model_to_json(const QuantumModel& model) {
  Json ms = Json::array();
  for (const auto& m : model.measurements()) ms.push_back(measurement_to_json(m));
  Json state = model.is_pure() ? Json{{"kind", "pure"}, {"data", vector_to_json(*model.pure_state())}}
                               : Json{{"kind", "mixed"}, {"data", matrix_to_json(model.density())}};
  return {{"d", model.dimension()}, {"state", state}, {"measurements", ms}};
}

inline QuantumModel model_from_json(const Json& j) {
  auto d = detail::get<long long>(j, "d");
  const auto& state = detail::field(j, "state");
  auto kind = detail::get<std::string>(state, "kind");
  std::vector<QuantumMeasurement> ms;
  for (const auto& m : detail::field(j, "measurements")) ms.push_back(measurement_from_json(m));
  auto check_dim = [&](Eigen::Index n) {
    if (n != d) throw Error(Errc::InvalidModel, "state dimension does not match d");
  };
  if (kind == "pure") {
    auto psi = vector_from_json(detail::field(state, "data"));
    check_dim(psi.size());
    return QuantumModel(psi, std::move(ms));
  }
  if (kind == "mixed") {
    auto rho = matrix_from_json(detail::field(state, "data"));
    check_dim(rho.rows());
    return QuantumModel(rho, std::move(ms));
  }
  throw Error(Errc::ParseError, "state kind must be 'pure' or 'mixed'");
}

inline Json sic_to_json(const SICSet& set) {
  Json ms = Json::array();
  for (const auto& m : set.measurements) ms.push_back(measurement_to_json(m));
  return {{"d", set.d},
          {"scenario", scenario_to_json(set.scenario())},
          {"measurements", ms},
          {"witness", inequality_to_json(set.witness)},
          {"mu", rational_to_json(set.mu)},
          {"q", set.q},
          {"embedded", set.embedded}};
}

inline SICSet sic_from_json(const Json& j) {
  auto s = scenario_from_json(detail::field(j, "scenario"));
  SICSet set{detail::get<long long>(j, "d"), {}, inequality_from_json(detail::field(j, "witness"), s),
             rational_from_json(detail::field(j, "mu")), detail::get<double>(j, "q"), {}};
  for (const auto& m : detail::field(j, "measurements")) set.measurements.push_back(measurement_from_json(m));
  set.embedded = j.contains("embedded") ? detail::get<std::vector<std::string>>(j, "embedded") : std::vector<std::string>{};
  return set;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline Json tightness_to_json(const TightnessReport& r) {
  return {{"verdict", to_string(r.verdict)},
          {"classical_bound", rational_to_json(r.classical_bound)},
          {"stored_bound", rational_to_json(r.stored_bound)},
          {"saturating_vertices", r.saturating_vertices},
          {"face_dimension", r.face_dimension},
          {"polytope_dimension", r.polytope_dimension}};
}

inline Json membership_to_json(const MembershipResult& r, const Scenario& s, const PolytopeDescription& desc) {
  Json j = {{"member", r.member}, {"approximate", r.approximate}};
  if (r.member) {
    Json weights = Json::array();
    for (const auto& [v, w] : r.weights) {
      Json assignment = Json::object();
      for (std::size_t m = 0; m < s.size(); ++m)
        assignment[s.measurement(static_cast<int>(m)).id] = s.measurement(static_cast<int>(m)).outcomes[desc.vertices[v].assignment[m]];
      weights.push_back({{"weight", rational_to_json(w)}, {"vertex", assignment}});
    }
    j["decomposition"] = weights;
  } else {
    j["witness"] = inequality_to_json(*r.witness);
    j["violation"] = rational_to_json(r.violation);
  }
  return j;
}

inline Json theta_to_json(const ThetaInterval& t) {
  return {{"lower", t.lower}, {"upper", t.upper}, {"width", t.width()}, {"iterations", t.iterations}};
}

inline Json invariants_to_json(const GraphInvariants& inv) {
  return {{"alpha", inv.alpha}, {"theta", theta_to_json(inv.theta)}, {"ratio", {{"lower", inv.ratio_lower}, {"upper", inv.ratio_upper}}}};
}

inline Json seesaw_to_json(const SeesawResult& r, const Scenario& s) {
  Json parties = Json::array();
  for (const auto& p : r.parties) {
    Json ids = Json::array();
    for (int m : p) ids.push_back(s.measurement(m).id);
    parties.push_back(ids);
  }
  Json runs = Json::array();
  for (const auto& run : r.runs)
    runs.push_back({{"value", run.value}, {"iterations", run.iterations}, {"converged", run.converged}});
  return {{"value", r.value},
          {"best_restart", r.best_restart},
          {"converged", r.converged},
          {"parties", parties},
          {"runs", runs},
          {"model", model_to_json(*r.model)},
          {"method", "seesaw lower bound"}};
}

inline Json dilation_to_json(const DilationResult& r) {
  Json blocks = Json::array();
  for (const auto& b : r.blocks) blocks.push_back({{"offset", b.offset}, {"rank", b.rank}});
  Json projectors = Json::array();
  for (const auto& p : r.projectors) projectors.push_back(matrix_to_json(p));
  return {{"dimension", r.dimension()}, {"isometry", matrix_to_json(r.isometry)}, {"blocks", blocks}, {"projectors", projectors}};
}

inline Json sic_report_to_json(const SicReport& r) {
  return {{"deviation", r.deviation},
          {"lambda_min", r.lambda_min},
          {"lambda_max", r.lambda_max},
          {"sample_min", r.sample_min},
          {"samples", r.samples},
          {"mu_stated", rational_to_json(r.mu_stated)},
          {"mu_computed", rational_to_json(r.mu_computed)},
          {"q", r.q},
          {"state_independent", r.state_independent},
          {"sic", r.sic}};
}

inline Json criticality_to_json(const CriticalityReport& r) {
  Json removals = Json::array();
  for (const auto& c : r.removals) removals.push_back({{"id", c.id}, {"breaks", c.breaks}, {"report", sic_report_to_json(c.report)}});
  return {{"critical", r.critical}, {"removals", removals}};
}

inline Json mapping_to_json(const MappingReport& r) {
  Json j = {{"arrow", r.arrow},
            {"class", to_string(r.connection)},
            {"source", {{"scenario", scenario_to_json(*r.source_scenario)},
                        {"inequality", inequality_to_json(r.source)},
                        {"bound", rational_to_json(r.source_bound)},
                        {"tightness", tightness_to_json(r.source_tightness)}}},
            {"bound_preserved", r.bound_preserved},
            {"tightness", r.tightness_change},
            {"notes", r.notes}};
  if (r.partition) j["partition"] = partition_to_json(*r.partition, *r.source_scenario);
  if (!r.labels.empty()) {
    Json labels = Json::object();
    for (std::size_t m = 0; m < r.labels.size(); ++m) labels[r.source_scenario->measurement(static_cast<int>(m)).id] = r.labels[m];
    j["labels"] = labels;
  }
  if (r.target)
    j["target"] = {{"scenario", scenario_to_json(r.target->scenario())},
                   {"inequality", inequality_to_json(*r.target)},
                   {"bound", rational_to_json(*r.target_bound)},
                   {"tightness", tightness_to_json(*r.target_tightness)}};
  if (r.source_quantum) j["source"]["quantum"] = {{"value", r.source_quantum->value}, {"method", r.source_quantum->method}};
  if (r.target_quantum && r.target)
    j["target"]["quantum"] = {{"value", r.target_quantum->value}, {"method", r.target_quantum->method}};
  return j;
}

inline Json sic_bell_to_json(const SicBellReport& r) {
  Json removals = Json::array();
  for (const auto& x : r.removals)
    removals.push_back({{"id", x.id},
                        {"local_bound", rational_to_json(x.local_bound)},
                        {"quantum_value", x.quantum_value},
                        {"violation", x.violation}});
  return {{"scenario", scenario_to_json(*r.scenario)},
          {"inequality", inequality_to_json(r.inequality)},
          {"local_bound", rational_to_json(r.local_bound)},
          {"mu", rational_to_json(r.mu)},
          {"local_bound_mismatch", r.local_bound_mismatch},
          {"quantum_value", r.quantum_value},
          {"violation", r.violation},
          {"removals", removals}};
}

inline Json event_form_to_json(const EventForm& form, const Scenario& s) {
  Json events = Json::array();
  for (std::size_t e = 0; e < form.events.size(); ++e) {
    Json ctx = Json::array(), asg = Json::array();
    for (std::size_t k = 0; k < form.events[e].context.size(); ++k) {
      const auto& m = s.measurement(form.events[e].context[k]);
      ctx.push_back(m.id);
      asg.push_back(m.outcomes[form.events[e].assignment[k]]);
    }
    events.push_back({{"context", ctx}, {"assignment", asg}, {"weight", rational_to_json(form.weights[e])}});
  }
  return {{"events", events}, {"offset", rational_to_json(form.offset)}, {"bound", rational_to_json(form.bound)}};
}

}  // namespace atlas::io
