#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "atlas/linalg.hpp"
#include "atlas/scenario.hpp"

namespace atlas {

using linalg::CMatrix;
using linalg::Complex;
using linalg::CVector;

inline constexpr double kQuantumTol = 1e-10;

/// Effects of one measurement, one per outcome in the scenario's outcome order.
struct QuantumMeasurement {
  std::string id;
  std::vector<CMatrix> effects;
  bool pvm = true;
};

namespace detail {

inline double max_abs(const CMatrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

inline bool commute(const CMatrix& a, const CMatrix& b, double tol) { return max_abs(a * b - b * a) <= tol; }

}  // namespace detail

/// Throws NotAPOVM unless the effects are d x d, Hermitian, PSD and sum to the identity.
inline void check_povm(const std::vector<CMatrix>& effects, double tol = kQuantumTol) {
  if (effects.empty()) throw Error(Errc::NotAPOVM, "no effects");
  const auto d = effects.front().rows();
  CMatrix sum = CMatrix::Zero(d, d);
  for (std::size_t k = 0; k < effects.size(); ++k) {
    const auto& e = effects[k];
    if (e.rows() != d || e.cols() != d) throw Error(Errc::NotAPOVM, "effect " + std::to_string(k) + " has the wrong shape");
    if (detail::max_abs(e - e.adjoint()) > tol) throw Error(Errc::NotAPOVM, "effect " + std::to_string(k) + " is not Hermitian");
    if (linalg::min_eigenvalue(e) < -tol)
      throw Error(Errc::NotAPOVM, "effect " + std::to_string(k) + " is not positive semidefinite");
    sum += e;
  }
  if (detail::max_abs(sum - CMatrix::Identity(d, d)) > tol) throw Error(Errc::NotAPOVM, "effects do not sum to the identity");
}

/// Idempotent and mutually orthogonal effects.
inline bool is_projective(const std::vector<CMatrix>& effects, double tol = kQuantumTol) {
  for (std::size_t a = 0; a < effects.size(); ++a) {
    if (detail::max_abs(effects[a] * effects[a] - effects[a]) > tol) return false;
    for (std::size_t b = a + 1; b < effects.size(); ++b)
      if (detail::max_abs(effects[a] * effects[b]) > tol) return false;
  }
  return true;
}

/// Projectors (I + M)/2 and (I - M)/2 of a ±1 observable, in the order of outcomes "+1", "-1".
inline std::vector<CMatrix> observable_effects(const CMatrix& m) {
  CMatrix id = CMatrix::Identity(m.rows(), m.cols());
  return {(id + m) / 2.0, (id - m) / 2.0};
}

/// Finite-dimensional state plus one effect list per measurement.
class QuantumModel {
 public:
  /// Pure state model.
  QuantumModel(CVector psi, std::vector<QuantumMeasurement> measurements)
      : d_(psi.size()), psi_(std::move(psi)), measurements_(std::move(measurements)) {
    if (d_ < 1) throw Error(Errc::InvalidModel, "empty state vector");
    if (std::abs(psi_->norm() - 1.0) > kQuantumTol) throw Error(Errc::InvalidModel, "state vector is not normalized");
    rho_ = linalg::outer(*psi_);
    check();
  }

  /// Mixed state model.
  QuantumModel(CMatrix rho, std::vector<QuantumMeasurement> measurements)
      : d_(rho.rows()), rho_(std::move(rho)), measurements_(std::move(measurements)) {
    if (d_ < 1 || rho_.cols() != d_) throw Error(Errc::InvalidModel, "density matrix must be square and non-empty");
    if (detail::max_abs(rho_ - rho_.adjoint()) > kQuantumTol) throw Error(Errc::InvalidModel, "density matrix is not Hermitian");
    if (std::abs(rho_.trace().real() - 1.0) > kQuantumTol) throw Error(Errc::InvalidModel, "density matrix trace is not 1");
    if (linalg::min_eigenvalue(rho_) < -kQuantumTol)
      throw Error(Errc::InvalidModel, "density matrix is not positive semidefinite");
    check();
  }

  Eigen::Index dimension() const { return d_; }
  bool is_pure() const { return psi_.has_value(); }
  const std::optional<CVector>& pure_state() const { return psi_; }
  const CMatrix& density() const { return rho_; }
  const std::vector<QuantumMeasurement>& measurements() const { return measurements_; }

  const QuantumMeasurement& measurement(const std::string& id) const {
    for (const auto& m : measurements_)
      if (m.id == id) return m;
    throw Error(Errc::InvalidModel, "model has no measurement '" + id + "'");
  }

 private:
  void check() const {
    for (std::size_t i = 0; i < measurements_.size(); ++i) {
      const auto& m = measurements_[i];
      for (std::size_t j = 0; j < i; ++j)
        if (measurements_[j].id == m.id) throw Error(Errc::InvalidModel, "duplicate measurement '" + m.id + "'");
      for (const auto& e : m.effects)
        if (e.rows() != d_ || e.cols() != d_)
          throw Error(Errc::InvalidModel, "effects of '" + m.id + "' do not match the state dimension");
      check_povm(m.effects);
      if (m.pvm && !is_projective(m.effects))
        throw Error(Errc::InvalidModel, "measurement '" + m.id + "' is flagged as a PVM but is not projective");
    }
  }

  Eigen::Index d_;
  std::optional<CVector> psi_;
  CMatrix rho_;
  std::vector<QuantumMeasurement> measurements_;
};

/// Tr(rho E_a E_b ...) for every outcome tuple of every maximal context, effects multiplied in
/// the scenario's member order.
inline FloatBehavior quantum_behavior(const QuantumModel& model, const ScenarioPtr& s) {
  std::vector<const QuantumMeasurement*> ms;
  for (const auto& m : s->measurements()) {
    const auto& qm = model.measurement(m.id);
    if (qm.effects.size() != m.outcomes.size())
      throw Error(Errc::InvalidModel, "measurement '" + m.id + "' has " + std::to_string(qm.effects.size()) +
                                          " effects but " + std::to_string(m.outcomes.size()) + " outcomes");
    ms.push_back(&qm);
  }
  for (auto [a, b] : s->compat().edges())
    for (const auto& ea : ms[a]->effects)
      for (const auto& eb : ms[b]->effects)
        if (!detail::commute(ea, eb, kQuantumTol))
          throw Error(Errc::NonCommutingContext, "'" + ms[a]->id + "' and '" + ms[b]->id + "' do not commute");

  std::vector<std::vector<double>> tables;
  for (std::size_t c = 0; c < s->contexts().size(); ++c) {
    const auto& members = s->contexts()[c].members;
    std::vector<double> table(s->table_size(c));
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      auto outcomes = s->decode_index(c, idx);
      CMatrix op = model.density();
      for (std::size_t k = 0; k < members.size(); ++k) op = op * ms[members[k]]->effects[outcomes[k]];
      double p = op.trace().real();
      table[idx] = std::abs(p) < 1e-15 ? 0.0 : p;
    }
    tables.push_back(std::move(table));
  }
  return FloatBehavior(s, std::move(tables));
}

// ---------------------------------------------------------------------------
// Neumark dilation
// ---------------------------------------------------------------------------

struct DilationBlock {
  std::size_t offset = 0;
  std::size_t rank = 0;
};

/// Isometry V (D x d) and a PVM on dimension D with <psi|E_k|psi> = |Pi_k V psi|^2.
struct DilationResult {
  CMatrix isometry;
  std::vector<CMatrix> projectors;
  std::vector<DilationBlock> blocks;

  Eigen::Index dimension() const { return isometry.rows(); }
};

/// Rank-block dilation: effect k contributes the rows sqrt(lambda_j) v_j^dagger of its nonzero
/// eigenpairs; Pi_k projects onto that block of rows. Eigenvalues below 1e-9 * lambda_max are
/// treated as zero; values between 1e-12 and 1e-9 times lambda_max are rejected as ambiguous.
inline DilationResult neumark_dilation(const std::vector<CMatrix>& effects) {
  check_povm(effects);
  const auto d = effects.front().rows();
  std::vector<std::vector<CVector>> rows(effects.size());
  DilationResult result;
  std::size_t total = 0;
  for (std::size_t k = 0; k < effects.size(); ++k) {
    auto eig = linalg::eigh(effects[k]);
    double top = eig.values(d - 1);
    DilationBlock block{total, 0};
    if (top > 0) {
      for (Eigen::Index j = d - 1; j >= 0; --j) {
        double lambda = eig.values(j);
        if (lambda > 1e-9 * top) {
          rows[k].push_back(std::sqrt(lambda) * eig.vectors.col(j));
        } else if (lambda >= 1e-12 * top) {
          throw Error(Errc::RankDeficiencyAmbiguous,
                      "effect " + std::to_string(k) + " has eigenvalue " + std::to_string(lambda) +
                          " between the zero and nonzero thresholds");
        }
      }
    }
    block.rank = rows[k].size();
    total += block.rank;
    result.blocks.push_back(block);
  }
  const auto dim = static_cast<Eigen::Index>(total);
  result.isometry = CMatrix::Zero(dim, d);
  for (std::size_t k = 0; k < effects.size(); ++k)
    for (std::size_t j = 0; j < rows[k].size(); ++j)
      result.isometry.row(static_cast<Eigen::Index>(result.blocks[k].offset + j)) = rows[k][j].adjoint();
  for (const auto& block : result.blocks) {
    CMatrix p = CMatrix::Zero(dim, dim);
    for (std::size_t j = 0; j < block.rank; ++j) {
      auto i = static_cast<Eigen::Index>(block.offset + j);
      p(i, i) = 1.0;
    }
    result.projectors.push_back(std::move(p));
  }
  return result;
}

/// Random POVM with `k` effects on dimension d: E_k = S^{-1/2} G_k G_k^dagger S^{-1/2} with
/// S = sum G_k G_k^dagger and Gaussian G_k of the given rank.
template <class Rng>
std::vector<CMatrix> random_povm(Eigen::Index d, std::size_t k, Rng& rng, Eigen::Index rank = 1) {
  std::normal_distribution<double> normal;
  std::vector<CMatrix> raw;
  CMatrix sum = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < k; ++i) {
    CMatrix g(d, rank);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < rank; ++c) g(r, c) = Complex(normal(rng), normal(rng));
    raw.push_back(g * g.adjoint());
    sum += raw.back();
  }
  auto eig = linalg::eigh(sum);
  linalg::RVector inv = eig.values.unaryExpr([](double x) { return 1.0 / std::sqrt(x); });
  CMatrix s = eig.vectors * inv.asDiagonal() * eig.vectors.adjoint();
  std::vector<CMatrix> effects;
  for (auto& e : raw) effects.push_back(linalg::hermitian_part(s * e * s));
  return effects;
}

}  // namespace atlas
