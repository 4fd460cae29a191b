// Dense complex kernels shared by the radar and communication models.
//
// Everything here is templated on the real scalar type so the same code can
// be instantiated for float or long double in tests; the library itself uses
// double throughout.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <span>
#include <vector>

#include "dfrc/errors.hpp"

namespace dfrc {

template <typename Real>
using CVec = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CMat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using CVector = CVec<double>;
using CMatrix = CMat<double>;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

template <typename Real>
struct EigenPair {
  Real value;
  CVec<Real> vector;
};

/// Kronecker product a ⊗ b.
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Largest entry magnitude; the scale used by the Hermitian-ness tolerance.
template <typename Derived>
auto max_abs(const Eigen::MatrixBase<Derived>& a) {
  return a.size() == 0 ? typename Eigen::NumTraits<typename Derived::Scalar>::Real(0)
                       : a.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a, double rel_tol = 1e-10) {
  if (a.rows() != a.cols()) return false;
  const auto scale = max_abs(a);
  return max_abs(a - a.adjoint()) <= rel_tol * scale;
}

/// Top eigenpair of a Hermitian PSD matrix by power iteration.
///
/// Starts from a fixed-seed random vector and stops once the eigen-residual
/// ‖Hv − λv‖ drops below tol·‖H‖_F. Throws NumericalError after max_iter
/// iterations, which in practice means the top of the spectrum is (nearly)
/// degenerate; the caller may retry with a different seed.
template <typename Real>
EigenPair<Real> max_eigpair(const CMat<Real>& h, Real tol = Real(1e-12), int max_iter = 10000,
                            unsigned seed = 0x5eed) {
  using C = std::complex<Real>;
  const Index n = h.rows();
  if (n == 0 || h.cols() != n) throw std::invalid_argument("max_eigpair: matrix must be square");

  std::mt19937 gen(seed);
  std::normal_distribution<Real> normal;
  CVec<Real> v(n);
  for (Index i = 0; i < n; ++i) v(i) = C(normal(gen), normal(gen));
  v.normalize();

  const Real scale = h.norm();
  if (scale == Real(0)) return {Real(0), v};

  for (int it = 0; it < max_iter; ++it) {
    CVec<Real> hv = h * v;
    const Real lambda = std::real(v.dot(hv));
    if ((hv - lambda * v).norm() <= tol * scale) return {lambda, v};
    const Real nrm = hv.norm();
    if (nrm == Real(0)) return {Real(0), v};  // v lies in the nullspace of a PSD matrix
    v = hv / nrm;
  }
  throw NumericalError("max_eigpair: power iteration did not converge (degenerate spectrum?)");
}

/// Solves A x = b for Hermitian positive-definite A via Cholesky.
template <typename Real>
CVec<Real> solve_hpd(const CMat<Real>& a, const CVec<Real>& b) {
  Eigen::LLT<CMat<Real>> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("solve_hpd: matrix is not positive definite");
  }
  return llt.solve(b);
}

/// Orthogonal projector onto the complement of span(vectors) in C^dim.
///
/// The basis is built with modified Gram-Schmidt (two passes); a residual
/// column is dropped when its norm is below rank_tol times the largest input
/// norm. An empty list yields the identity.
template <typename Real>
CMat<Real> projector_complement(std::span<const CVec<Real>> vectors, Index dim,
                                Real rank_tol = Real(1e-10)) {
  CMat<Real> proj = CMat<Real>::Identity(dim, dim);
  Real largest = 0;
  for (const auto& v : vectors) {
    if (v.size() != dim) throw std::invalid_argument("projector_complement: dimension mismatch");
    largest = std::max(largest, v.norm());
  }
  if (largest == Real(0)) return proj;

  std::vector<CVec<Real>> basis;
  for (const auto& v : vectors) {
    CVec<Real> r = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) r -= q.dot(r) * q;
    }
    const Real nrm = r.norm();
    if (nrm > rank_tol * largest) basis.push_back(r / nrm);
  }
  for (const auto& q : basis) proj.noalias() -= q * q.adjoint();
  return proj;
}

template <typename Real>
CMat<Real> projector_complement(const std::vector<CVec<Real>>& vectors, Index dim,
                                Real rank_tol = Real(1e-10)) {
  return projector_complement<Real>(std::span<const CVec<Real>>(vectors), dim, rank_tol);
}

/// vec(U) -> U for a column-major stacking with `rows` rows.
template <typename Real>
CMat<Real> unvec(const CVec<Real>& v, Index rows) {
  return Eigen::Map<const CMat<Real>>(v.data(), rows, v.size() / rows);
}

}  // namespace dfrc
