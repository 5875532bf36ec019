#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "atlas/parallel.hpp"
#include "atlas/quantum.hpp"

namespace atlas {

struct SeesawOptions {
  Eigen::Index local_dimension = 2;
  int restarts = 20;
  int max_iterations = 2000;
  /// A run stops once one sweep improves the value by less than this.
  double tol = 1e-13;
  std::uint64_t seed = 0;
  Eigen::Index max_dimension = 1024;
};

struct SeesawRun {
  double value = 0;
  int iterations = 0;
  bool converged = false;
  /// Value after every sweep; non-decreasing up to rounding.
  std::vector<double> trace;
};

struct SeesawResult {
  double value = 0;
  std::size_t best_restart = 0;
  bool converged = false;
  /// Measurements assigned to each tensor factor.
  std::vector<std::vector<int>> parties;
  std::vector<SeesawRun> runs;
  /// Realization of the best value: pure state and ±1-observable projectors on the joint space.
  std::optional<QuantumModel> model;
};

namespace detail {

// Tensor-product model: party p holds the observables of its colour class on C^d.
class SeesawProblem {
 public:
  SeesawProblem(const Inequality& ineq, const SeesawOptions& opts) : ineq_(ineq), d_(opts.local_dimension) {
    const auto& s = ineq.scenario();
    if (d_ < 2) throw Error(Errc::InvalidModel, "local dimension must be at least 2");
    if (!s.all_dichotomic()) throw Error(Errc::NotDichotomic, "seesaw needs dichotomic measurements");
    std::optional<Partition> colouring;
    for (std::size_t n = 1; n <= s.size() && !colouring; ++n) colouring = find_n_partition(s.compat(), n);
    parties_ = colouring ? colouring->parts : std::vector<std::vector<int>>{};
    party_of_ = colouring ? colouring->part_of(s.size()) : std::vector<int>{};
    dim_ = 1;
    for (std::size_t p = 0; p < parties_.size(); ++p) {
      dim_ *= d_;
      if (dim_ > opts.max_dimension)
        throw Error(Errc::DimensionTooLarge, "joint dimension exceeds " + std::to_string(opts.max_dimension));
    }
  }

  const std::vector<std::vector<int>>& parties() const { return parties_; }
  Eigen::Index dimension() const { return dim_; }

  /// Inequality operator for observables `obs` (one d x d matrix per measurement).
  CMatrix operator_for(const std::vector<CMatrix>& obs) const {
    CMatrix w = CMatrix::Zero(dim_, dim_);
    for (const auto& t : ineq_.terms()) w += linalg_term(obs, t, -1);
    return w;
  }

  /// F with <psi|W|psi> = const + Re Tr(M_m F) as a function of the observable of measurement m.
  CMatrix effective_operator(const std::vector<CMatrix>& obs, const CVector& psi, int m) const {
    const int p = party_of_[m];
    const auto rest = dim_ / d_;
    CMatrix g = CMatrix::Zero(rest, rest);
    for (const auto& t : ineq_.terms()) {
      auto it = std::find(t.context.begin(), t.context.end(), m);
      if (it == t.context.end()) continue;
      double sign = t.assignment[static_cast<std::size_t>(it - t.context.begin())] == 0 ? 0.5 : -0.5;
      g += sign * linalg_term(obs, t, p);
    }
    // Psi(i_p, rest) regroups the amplitudes with party p's index first.
    CMatrix big(d_, rest);
    const auto parties = static_cast<int>(parties_.size());
    for (Eigen::Index i = 0; i < dim_; ++i) {
      Eigen::Index rem = i, r = 0, ip = 0, stride = dim_;
      for (int q = 0; q < parties; ++q) {
        stride /= d_;
        Eigen::Index digit = rem / stride;
        rem %= stride;
        if (q == p)
          ip = digit;
        else
          r = r * d_ + digit;
      }
      big(ip, r) = psi(i);
    }
    return big * g.transpose() * big.adjoint();
  }

  std::vector<CMatrix> random_observables(std::mt19937_64& rng) const {
    std::vector<CMatrix> obs;
    Eigen::VectorXcd diag(d_);
    for (Eigen::Index k = 0; k < d_; ++k) diag(k) = k % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t m = 0; m < ineq_.scenario().size(); ++m) {
      CMatrix u = linalg::random_unitary(d_, rng);
      obs.push_back(u * diag.asDiagonal() * u.adjoint());
    }
    return obs;
  }

  /// Embeds a local operator of party p into the joint space.
  CMatrix embed(const CMatrix& local, int p) const {
    CMatrix out = CMatrix::Identity(1, 1);
    CMatrix id = CMatrix::Identity(d_, d_);
    for (int q = 0; q < static_cast<int>(parties_.size()); ++q) out = linalg::kron(out, q == p ? local : id);
    return out;
  }

  int party_of(int m) const { return party_of_[m]; }

 private:
  // Tensor product of the term's projectors (identity elsewhere), omitting party `skip`.
  CMatrix linalg_term(const std::vector<CMatrix>& obs, const Term& t, int skip) const {
    CMatrix id = CMatrix::Identity(d_, d_);
    std::vector<CMatrix> factors(parties_.size(), id);
    for (std::size_t k = 0; k < t.context.size(); ++k) {
      int m = t.context[k];
      if (party_of_[m] == skip) continue;
      factors[party_of_[m]] = t.assignment[k] == 0 ? CMatrix((id + obs[m]) / 2.0) : CMatrix((id - obs[m]) / 2.0);
    }
    CMatrix out = CMatrix::Identity(1, 1);
    for (int q = 0; q < static_cast<int>(parties_.size()); ++q)
      if (q != skip) out = linalg::kron(out, factors[q]);
    return to_double(t.coef) * out;
  }

  const Inequality& ineq_;
  Eigen::Index d_;
  Eigen::Index dim_ = 1;
  std::vector<std::vector<int>> parties_;
  std::vector<int> party_of_;
};

inline CVector top_eigenvector(const CMatrix& w, double& value) {
  auto eig = linalg::eigh(w);
  const auto last = eig.values.size() - 1;
  value = eig.values(last);
  return eig.vectors.col(last);
}

}  // namespace detail

/// Alternating maximization of the inequality over pure states and ±1 observables in a
/// tensor-product model. Parties are the colour classes of a minimum colouring of the
/// compatibility graph, each with local dimension d. Every run yields a valid quantum model,
/// so the reported value is a lower bound on the quantum maximum.
inline SeesawResult seesaw_max(const Inequality& ineq, const SeesawOptions& opts = {}) {
  if (opts.restarts < 1) throw Error(Errc::UsageError, "at least one restart is needed");
  detail::SeesawProblem problem(ineq, opts);
  const auto& s = ineq.scenario();
  struct Outcome {
    SeesawRun run;
    std::vector<CMatrix> observables;
    CVector state;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(opts.restarts));
  parallel_for(outcomes.size(), [&](std::size_t r) {
    std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    auto obs = problem.random_observables(rng);
    double value = 0;
    CVector psi = detail::top_eigenvector(problem.operator_for(obs), value);
    SeesawRun run;
    run.trace.push_back(value);
    for (int it = 1; it <= opts.max_iterations; ++it) {
      for (std::size_t m = 0; m < s.size(); ++m) {
        CMatrix f = problem.effective_operator(obs, psi, static_cast<int>(m));
        obs[m] = linalg::hermitian_sign(f);
      }
      double next = 0;
      psi = detail::top_eigenvector(problem.operator_for(obs), next);
      run.trace.push_back(next);
      run.iterations = it;
      bool done = next - value < opts.tol;
      value = std::max(value, next);
      if (done) {
        run.converged = true;
        break;
      }
    }
    run.value = value;
    outcomes[r] = {std::move(run), std::move(obs), std::move(psi)};
  });

  SeesawResult result;
  result.parties = problem.parties();
  for (std::size_t r = 0; r < outcomes.size(); ++r)
    if (r == 0 || outcomes[r].run.value > result.value) {
      result.value = outcomes[r].run.value;
      result.best_restart = r;
    }
  const auto& best = outcomes[result.best_restart];
  result.converged = best.run.converged;
  std::vector<QuantumMeasurement> ms;
  for (std::size_t m = 0; m < s.size(); ++m) {
    CMatrix joint = problem.embed(best.observables[m], problem.party_of(static_cast<int>(m)));
    ms.push_back({s.measurement(static_cast<int>(m)).id, observable_effects(joint), true});
  }
  result.model.emplace(best.state, std::move(ms));
  for (auto& o : outcomes) result.runs.push_back(std::move(o.run));
  return result;
}

}  // namespace atlas
