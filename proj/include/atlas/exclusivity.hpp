#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "atlas/graph.hpp"
#include "atlas/scenario.hpp"

namespace atlas {

/// One outcome assignment on a set of compatible measurements.
struct Event {
  std::vector<int> context;
  std::vector<int> assignment;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Two events are exclusive when some shared measurement gets different outcomes.
inline bool exclusive(const Event& a, const Event& b) {
  for (std::size_t i = 0; i < a.context.size(); ++i)
    for (std::size_t j = 0; j < b.context.size(); ++j)
      if (a.context[i] == b.context[j] && a.assignment[i] != b.assignment[j]) return true;
  return false;
}

/// Witness rewritten as sum_e weight_e P(e) + offset with positive weights.
struct EventForm {
  std::vector<Event> events;
  std::vector<Rational> weights;
  Rational offset = 0;
  /// Bound on sum_e weight_e P(e), i.e. the inequality's bound minus the offset.
  Rational bound = 0;

  bool unit_weights() const {
    return std::all_of(weights.begin(), weights.end(), [](const Rational& w) { return w == 1; });
  }
};

/// Groups terms by context and shifts every context table by its smallest coefficient, using
/// sum_a P(a|C) = 1, so all remaining coefficients are nonnegative. A correlator <M_i M_j>
/// becomes 2 P(+,+) + 2 P(-,-) - 1 this way.
inline EventForm to_event_form(const Inequality& ineq) {
  const auto& s = ineq.scenario();
  std::map<std::vector<int>, std::map<std::vector<int>, Rational>> grouped;
  for (const auto& t : ineq.terms()) grouped[t.context][t.assignment] += t.coef;

  EventForm form;
  for (auto& [context, table] : grouped) {
    std::size_t total = 1;
    for (int m : context) total *= static_cast<std::size_t>(s.outcome_count(m));
    Rational low = table.begin()->second;
    for (const auto& [a, c] : table) low = std::min(low, c);
    if (table.size() < total) low = std::min(low, Rational(0));
    if (low < 0) form.offset += low;
    std::vector<int> a(context.size(), 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
      auto it = table.find(a);
      Rational w = (it == table.end() ? Rational(0) : it->second) - (low < 0 ? low : Rational(0));
      if (w != 0) {
        form.events.push_back({context, a});
        form.weights.push_back(w);
      }
      for (std::size_t k = a.size(); k-- > 0;) {
        if (++a[k] < s.outcome_count(context[k])) break;
        a[k] = 0;
      }
    }
  }
  for (const auto& w : form.weights)
    if (w < 0) throw Error(Errc::NotInEventForm, "negative event weight after normalization");
  form.bound = ineq.bound() - form.offset;
  return form;
}

/// One vertex per event of the normalized witness, edges between exclusive events.
inline Graph exclusivity_graph(const EventForm& form) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < form.events.size(); ++i)
    for (std::size_t j = i + 1; j < form.events.size(); ++j)
      if (exclusive(form.events[i], form.events[j])) edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
  return Graph(form.events.size(), edges);
}

inline Graph exclusivity_graph(const Inequality& ineq) { return exclusivity_graph(to_event_form(ineq)); }

}  // namespace atlas
