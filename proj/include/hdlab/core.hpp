#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace hdlab {

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;

inline constexpr double kStructuralTol = 1e-10;

inline double mat_scale(const cmat& a) { return std::max(1.0, a.norm()); }

inline cmat commutator(const cmat& a, const cmat& b) { return a * b - b * a; }

/// Removes the trace so the result lies in sl(n,C).
inline cmat traceless(const cmat& a) {
  const int n = static_cast<int>(a.rows());
  return a - (a.trace() / static_cast<double>(n)) * cmat::Identity(n, n);
}

inline bool is_square(const cmat& a) { return a.rows() == a.cols() && a.rows() >= 1; }

inline bool is_traceless(const cmat& a, double tol = kStructuralTol) {
  return std::abs(a.trace()) <= tol * mat_scale(a);
}

inline bool is_hermitian(const cmat& a, double tol = kStructuralTol) {
  return (a - a.adjoint()).norm() <= tol * mat_scale(a);
}

inline bool is_skew_hermitian(const cmat& a, double tol = kStructuralTol) {
  return (a + a.adjoint()).norm() <= tol * mat_scale(a);
}

inline bool is_unitary(const cmat& a, double tol = kStructuralTol) {
  const int n = static_cast<int>(a.rows());
  return (a.adjoint() * a - cmat::Identity(n, n)).norm() <= tol * mat_scale(a);
}

inline bool is_special(const cmat& a, double tol = kStructuralTol) {
  return std::abs(a.determinant() - 1.0) <= tol * mat_scale(a);
}

/// Upper triangular with real positive diagonal entries and unit determinant.
inline bool is_borel(const cmat& a, double tol = kStructuralTol) {
  const int n = static_cast<int>(a.rows());
  const double s = tol * mat_scale(a);
  for (int i = 0; i < n; ++i) {
    if (std::abs(a(i, i).imag()) > s || a(i, i).real() <= 0.0) return false;
    for (int j = 0; j < i; ++j)
      if (std::abs(a(i, j)) > s) return false;
  }
  return is_special(a, tol);
}

/// Unit diagonal, strictly lower part zero.
inline bool is_unipotent_upper(const cmat& a, double tol = kStructuralTol) {
  const int n = static_cast<int>(a.rows());
  const double s = tol * mat_scale(a);
  for (int i = 0; i < n; ++i) {
    if (std::abs(a(i, i) - 1.0) > s) return false;
    for (int j = 0; j < i; ++j)
      if (std::abs(a(i, j)) > s) return false;
  }
  return true;
}

inline bool is_pos_hermitian(const cmat& a, double tol = kStructuralTol) {
  if (!is_hermitian(a, tol)) return false;
  Eigen::SelfAdjointEigenSolver<cmat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > 0.0 && is_special(a, tol);
}

inline bool is_real_diagonal(const cmat& a, double tol = kStructuralTol) {
  const int n = static_cast<int>(a.rows());
  const double s = tol * mat_scale(a);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i != j && std::abs(a(i, j)) > s) return false;
      if (i == j && std::abs(a(i, i).imag()) > s) return false;
    }
  return true;
}

inline bool is_strictly_upper(const cmat& a, double tol = kStructuralTol) {
  const int n = static_cast<int>(a.rows());
  const double s = tol * mat_scale(a);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      if (std::abs(a(i, j)) > s) return false;
  return true;
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace hdlab
