#pragma once

#include <Eigen/Dense>

#include <complex>
#include <random>

namespace atlas::linalg {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline CMatrix hermitian_part(const CMatrix& a) { return (a + a.adjoint()) / 2.0; }

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
struct HermitianEigen {
  RVector values;
  CMatrix vectors;
};

inline HermitianEigen eigh(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(a));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_eigenvalue(const CMatrix& a) { return eigh(a).values(0); }
inline double max_eigenvalue(const CMatrix& a) {
  auto e = eigh(a);
  return e.values(e.values.size() - 1);
}

/// Spectral norm of a Hermitian matrix.
inline double hermitian_norm(const CMatrix& a) {
  auto e = eigh(a);
  return std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
}

/// Positive square root of a positive semidefinite matrix; negative noise is clipped.
inline CMatrix psd_sqrt(const CMatrix& a) {
  auto e = eigh(a);
  RVector roots = e.values.unaryExpr([](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
  return e.vectors * roots.asDiagonal() * e.vectors.adjoint();
}

/// Sign function of a Hermitian matrix (zero eigenvalues mapped to +1). This is the
/// unitary factor of its polar decomposition and the ±1 observable maximizing Tr(M F).
inline CMatrix hermitian_sign(const CMatrix& a) {
  auto e = eigh(a);
  RVector s = e.values.unaryExpr([](double x) { return x >= 0 ? 1.0 : -1.0; });
  return e.vectors * s.asDiagonal() * e.vectors.adjoint();
}

/// Unitary factor U of the polar decomposition A = U P.
inline CMatrix polar_unitary(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CMatrix outer(const CVector& v) { return v * v.adjoint(); }

/// Haar-distributed unitary via QR of a complex Gaussian matrix with phase correction.
template <class Rng>
CMatrix random_unitary(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> normal;
  CMatrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < d; ++k) {
    Complex diag = r(k, k);
    double mag = std::abs(diag);
    if (mag > 0) q.col(k) *= diag / mag;
  }
  return q;
}

template <class Rng>
CVector random_state(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> normal;
  CVector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = Complex(normal(rng), normal(rng));
  return v / v.norm();
}

}  // namespace atlas::linalg
