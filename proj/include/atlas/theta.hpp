#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>

#include "atlas/graph.hpp"

namespace atlas {

struct ThetaOptions {
  double tol = 1e-7;
  int max_iterations = 200000;
  std::size_t size_limit = 64;
};

/// Lovász number bracketed by a feasible primal point (lower) and a feasible dual point (upper).
struct ThetaInterval {
  double lower = 0;
  double upper = 0;
  int iterations = 0;

  double width() const { return upper - lower; }
  double midpoint() const { return 0.5 * (lower + upper); }
};

namespace detail {

inline double lambda_max(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m.rows() - 1);
}

// Objective of the repaired primal point: edge entries zeroed, diagonal shifted until PSD,
// trace normalized. Any X yields a feasible point, so this is always a valid lower bound.
inline double theta_lower_bound(const Graph& g, Eigen::MatrixXd x) {
  for (auto [i, j] : g.edges()) x(i, j) = x(j, i) = 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x, Eigen::EigenvaluesOnly);
  double shift = es.eigenvalues()(0);
  if (shift < 0) x.diagonal().array() -= shift;
  double tr = x.trace();
  if (!(tr > 0)) return 0.0;
  return x.sum() / tr;
}

// lambda_max(J + sum_e w_e (E_ij + E_ji)) bounds theta from above for any edge weights.
inline double theta_upper_bound(const Graph& g, const Eigen::VectorXd& edge_weight) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(n, n);
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    auto [i, j] = g.edges()[k];
    m(i, j) += edge_weight(static_cast<Eigen::Index>(k));
    m(j, i) += edge_weight(static_cast<Eigen::Index>(k));
  }
  return lambda_max(m);
}

}  // namespace detail

/// Lovász theta of `g`: max <J,X> subject to Tr X = 1, X_ij = 0 on edges, X PSD.
///
/// Solved with an alternating-direction augmented Lagrangian scheme on the dual: each sweep
/// is a closed-form multiplier update for the (mutually orthogonal) affine constraints
/// followed by a projection onto the PSD cone. Bounds are certified at check points and the
/// loop stops once upper - lower <= tol.
inline ThetaInterval lovasz_theta(const Graph& g, double tol, const ThetaOptions& opts = {}) {
  // Over-relaxation factor for the X update; convergent for values below the golden ratio.
  constexpr double kStep = 1.6;
  if (g.size() > opts.size_limit)
    throw Error(Errc::SizeLimitExceeded,
                std::to_string(g.size()) + " vertices exceeds the limit of " + std::to_string(opts.size_limit));
  if (!(tol > 0)) throw Error(Errc::ConvergenceFailure, "tolerance must be positive");
  const auto n = static_cast<Eigen::Index>(g.size());
  ThetaInterval result;
  if (n == 0) return result;

  const auto& edges = g.edges();
  const auto m = static_cast<Eigen::Index>(edges.size());
  const double root2 = std::sqrt(2.0);
  const double dn = static_cast<double>(n);

  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(n, n) / dn;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd v(n, n);
  Eigen::VectorXd y_edge = Eigen::VectorXd::Zero(m);
  double mu = 1.0;
  double best_lower = -std::numeric_limits<double>::infinity();
  double best_upper = std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  double primal_acc = 0, dual_acc = 0;

  for (int it = 1; it <= opts.max_iterations; ++it) {
    // Multiplier update: (AA*)^{-1} = diag(1/n, 1, ..., 1) for A_0 = I, A_e = (E_ij+E_ji)/sqrt2.
    double y0 = -(mu * (x.trace() - 1.0) + s.trace() + dn) / dn;
    for (Eigen::Index k = 0; k < m; ++k) {
      auto [i, j] = edges[static_cast<std::size_t>(k)];
      y_edge(k) = -(mu * root2 * x(i, j) + root2 * (s(i, j) + 1.0));
    }
    // V = C - A*(y) - mu X with C = -J.
    v = -Eigen::MatrixXd::Ones(n, n) - mu * x;
    v.diagonal().array() -= y0;
    for (Eigen::Index k = 0; k < m; ++k) {
      auto [i, j] = edges[static_cast<std::size_t>(k)];
      v(i, j) -= y_edge(k) / root2;
      v(j, i) -= y_edge(k) / root2;
    }
    es.compute(v);
    const auto& lam = es.eigenvalues();
    const auto& q = es.eigenvectors();
    Eigen::VectorXd pos = lam.cwiseMax(0.0);
    Eigen::VectorXd neg = (-lam).cwiseMax(0.0);
    s = q * pos.asDiagonal() * q.transpose();
    Eigen::MatrixXd x_next = (1.0 - kStep) * x + (kStep / mu) * (q * neg.asDiagonal() * q.transpose());

    double primal_res = (x_next.trace() - 1.0) * (x_next.trace() - 1.0);
    for (auto [i, j] : edges) primal_res += 2.0 * x_next(i, j) * x_next(i, j);
    primal_res = std::sqrt(primal_res);
    double dual_res = mu * (x_next - x).norm() / (1.0 + dn);
    x = std::move(x_next);
    primal_acc += primal_res;
    dual_acc += dual_res;

    if (it % 25 == 0) {
      best_lower = std::max(best_lower, detail::theta_lower_bound(g, x));
      best_upper = std::min(best_upper, detail::theta_upper_bound(g, y_edge / root2));
      result = {best_lower, best_upper, it};
      if (best_upper - best_lower <= tol) return result;
      // Balance primal and dual progress.
      if (primal_acc > 2.0 * dual_acc)
        mu = std::min(mu / 0.7, 1e6);
      else if (dual_acc > 2.0 * primal_acc)
        mu = std::max(mu * 0.7, 1e-6);
      primal_acc = dual_acc = 0;
    }
  }
  throw Error(Errc::ConvergenceFailure, "theta interval width " + std::to_string(best_upper - best_lower) +
                                            " above tolerance after " + std::to_string(opts.max_iterations) +
                                            " iterations");
}

/// Independence number, theta interval and their ratio bundled together.
struct GraphInvariants {
  int alpha = 0;
  ThetaInterval theta;
  double ratio_lower = 0;
  double ratio_upper = 0;
};

inline GraphInvariants contextuality_ratio(const Graph& g, double tol, const ThetaOptions& opts = {}) {
  GraphInvariants inv;
  inv.alpha = independence_number(g, opts.size_limit);
  inv.theta = lovasz_theta(g, tol, opts);
  if (inv.alpha > 0) {
    inv.ratio_lower = inv.theta.lower / inv.alpha;
    inv.ratio_upper = inv.theta.upper / inv.alpha;
  }
  return inv;
}

}  // namespace atlas
