#pragma once

// Group-level factorizations on SL(n,C): Iwasawa decompositions into
// unitary and Borel factors, the squaring map b -> b b^† and its inverse,
// dressing and quasi-adjoint actions, and the Borel split b = e^p b_+.

#include "hdlab/algebra.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <optional>
#include <utility>

namespace hdlab {

struct IwasawaFactors {
  cmat g_left;   // K = g_left * b_right^{-1}
  cmat b_right;
  cmat b_left;   // K = b_left * g_right^{-1}
  cmat g_right;
  double condition = 0.0;
  bool ill_conditioned = false;
};

namespace detail {

/// QR with the triangular factor forced to have positive real diagonal.
inline std::pair<cmat, cmat> qr_positive(const cmat& a) {
  Eigen::HouseholderQR<cmat> qr(a);
  cmat q = qr.householderQ();
  cmat r = qr.matrixQR().triangularView<Eigen::Upper>();
  const int n = static_cast<int>(a.rows());
  cvec phase(n);
  for (int i = 0; i < n; ++i) {
    const cplx d = r(i, i);
    phase[i] = (std::abs(d) == 0.0) ? cplx(1, 0) : d / std::abs(d);
  }
  q = q * phase.asDiagonal();
  r = phase.conjugate().asDiagonal() * r;
  return {q, r};
}

inline double condition_estimate(const cmat& a) {
  Eigen::JacobiSVD<cmat> svd(a);
  const double smin = svd.singularValues().minCoeff();
  return smin > 0.0 ? svd.singularValues().maxCoeff() / smin : 1e300;
}

}  // namespace detail

/// Unique decompositions K = g_L b_R^{-1} = b_L g_R^{-1} with unitary g and
/// Borel b, computed from QR factorizations of K and K^{-1}.
inline IwasawaFactors iwasawa(const cmat& K) {
  require(is_square(K), "iwasawa: non-square input");
  require(is_special(K, 1e-8), "iwasawa: determinant must be 1");
  IwasawaFactors f;
  auto [q1, r1] = detail::qr_positive(K);
  f.g_left = q1;
  f.b_right = r1.inverse();
  auto [q2, r2] = detail::qr_positive(cmat(K.inverse()));
  f.g_right = q2;
  f.b_left = r2.inverse();
  f.condition = detail::condition_estimate(K);
  f.ill_conditioned = f.condition > 1e12;
  return f;
}

inline cmat xi_left(const cmat& K) { return iwasawa(K).g_left; }
inline cmat xi_right(const cmat& K) { return iwasawa(K).g_right; }
inline cmat lambda_left(const cmat& K) { return iwasawa(K).b_left; }
inline cmat lambda_right(const cmat& K) { return iwasawa(K).b_right; }

/// nu(b) = b b^†, a bijection from the Borel group onto the positive
/// Hermitian determinant-one matrices.
inline cmat nu(const cmat& b) { return b * b.adjoint(); }

/// Inverse of nu by reversal-conjugated Cholesky: factor J L J with the
/// index-reversal permutation J and conjugate the lower factor back.
inline cmat nu_inverse(const cmat& L) {
  require(is_square(L), "nu_inverse: non-square input");
  const int n = static_cast<int>(L.rows());
  cmat J = cmat::Zero(n, n);
  for (int i = 0; i < n; ++i) J(i, n - 1 - i) = 1.0;
  Eigen::LLT<cmat> llt(cmat(J * L * J));
  if (llt.info() != Eigen::Success)
    throw std::domain_error("nu_inverse: input is not positive definite");
  cmat lower = llt.matrixL();
  return J * lower * J;
}

/// Dressing action of the unitary group on the Borel group.
inline cmat dress(const cmat& eta, const cmat& b) { return lambda_left(eta * b); }

/// Quasi-adjoint action eta . K = eta K Xi_R(eta Lambda_L(K)).
inline cmat quasi_adjoint(const cmat& eta, const cmat& K) {
  return eta * K * xi_right(eta * lambda_left(K));
}

/// Product of both Borel factors; generates the quasi-adjoint action.
inline cmat moment_map(const cmat& K) {
  const auto f = iwasawa(K);
  return f.b_left * f.b_right;
}

/// Simultaneous twisted conjugation on a pair of positive Hermitian
/// matrices, with the twist read off from the first component.
inline std::pair<cmat, cmat> hat_action(const cmat& eta, const cmat& L1, const cmat& L2) {
  const cmat b1 = nu_inverse(L1).inverse();
  const cmat xi = xi_right(eta * b1);
  const cmat xi_inv = xi.adjoint();
  return {xi_inv * L1 * xi, xi_inv * L2 * xi};
}

struct BorelSplit {
  cmat p;       // real traceless diagonal
  cmat b_plus;  // unit-diagonal upper triangular
};

/// b = exp(p) b_+ with p the logarithm of the diagonal.
inline BorelSplit split_borel(const cmat& b) {
  const int n = static_cast<int>(b.rows());
  BorelSplit s{cmat::Zero(n, n), b};
  cmat einv = cmat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    require(b(i, i).real() > 0.0, "split_borel: diagonal must be positive");
    s.p(i, i) = std::log(b(i, i).real());
    einv(i, i) = 1.0 / b(i, i).real();
  }
  s.b_plus = einv * b;
  return s;
}

struct Regularity {
  bool regular = false;
  double margin = 0.0;
};

namespace detail {

inline Regularity min_gap(const cvec& vals, double gap) {
  Regularity r;
  r.margin = 1e300;
  const int n = static_cast<int>(vals.size());
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) r.margin = std::min(r.margin, std::abs(vals[j] - vals[k]));
  if (n < 2) r.margin = 0.0;
  r.regular = r.margin > gap;
  return r;
}

}  // namespace detail

inline constexpr double kRegularityGap = 1e-6;

/// Pairwise eigenvalue separation for unitary (chordal), positive
/// Hermitian, or Borel inputs.
inline Regularity regularity(const cmat& a, double gap = kRegularityGap) {
  const int n = static_cast<int>(a.rows());
  const bool triangular = [&] {
    const double s = 1e-12 * mat_scale(a);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        if (std::abs(a(i, j)) > s) return false;
    return true;
  }();
  if (triangular) {  // eigenvalues sit on the diagonal

    cvec d(n);
    for (int i = 0; i < n; ++i) d[i] = a(i, i);
    return detail::min_gap(d, gap);
  }
  if (is_hermitian(a, 1e-8)) {
    Eigen::SelfAdjointEigenSolver<cmat> es(a, Eigen::EigenvaluesOnly);
    return detail::min_gap(es.eigenvalues().cast<cplx>(), gap);
  }
  if (is_unitary(a, 1e-8)) {
    Eigen::ComplexEigenSolver<cmat> es(a, false);
    return detail::min_gap(es.eigenvalues(), gap);
  }
  throw std::invalid_argument("regularity: expected diagonal, Hermitian, unitary, or Borel");
}

}  // namespace hdlab
