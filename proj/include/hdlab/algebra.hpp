#pragma once

// Realization of sl(n,C) as the Manin triple su(n) + borel with the
// imaginary-trace pairing: subspace projections, root data, dual bases,
// and structured exponentials.

#include "hdlab/core.hpp"
#include "hdlab/exp.hpp"

#include <Eigen/Eigenvalues>

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

namespace hdlab {

/// <X,Y> = Im tr(XY), the invariant form making su(n) and the Borel
/// subalgebra a pair of isotropic complements.
inline double pairing(const cmat& x, const cmat& y) {
  require(is_square(x) && x.rows() == y.rows() && y.rows() == y.cols(),
          "pairing: dimension mismatch");
  return (x * y).trace().imag();
}

struct TriangularParts {
  cmat lower, diag, upper;
};

inline TriangularParts project_triangular(const cmat& x) {
  require(is_square(x), "project_triangular: non-square input");
  const int n = static_cast<int>(x.rows());
  TriangularParts p{cmat::Zero(n, n), cmat::Zero(n, n), cmat::Zero(n, n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j)
        p.diag(i, j) = x(i, j);
      else if (i < j)
        p.upper(i, j) = x(i, j);
      else
        p.lower(i, j) = x(i, j);
    }
  return p;
}

struct ManinParts {
  cmat g;  // skew-Hermitian summand, in su(n)
  cmat b;  // upper triangular with real diagonal
};

/// X = X_< + X_0 + X_>  ->  (X_< - X_<^†  + i Im X_0,  X_> + X_<^† + Re X_0).
inline ManinParts project_manin(const cmat& x) {
  require(is_square(x), "project_manin: non-square input");
  require(is_traceless(x), "project_manin: input must be traceless");
  const auto t = project_triangular(x);
  const cmat low_dag = t.lower.adjoint();
  cmat diag_re = 0.5 * (t.diag + t.diag.adjoint());
  cmat diag_im = 0.5 * (t.diag - t.diag.adjoint());
  ManinParts m;
  m.g = t.lower - low_dag + diag_im;
  m.b = t.upper + low_dag + diag_re;
  return m;
}

inline cmat manin_g(const cmat& x) { return project_manin(x).g; }
inline cmat manin_b(const cmat& x) { return project_manin(x).b; }

/// Projection of a su(n) element onto the diagonal Cartan part.
inline cmat cartan_part(const cmat& x) {
  const int n = static_cast<int>(x.rows());
  cmat d = cmat::Zero(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = x(i, i);
  return d;
}

inline cmat offdiag_part(const cmat& x) { return x - cartan_part(x); }

// ---------------------------------------------------------------------------
// Root data for the A_{n-1} series under the trace form.

struct Root {
  int j, k;  // positive root <-> ordered pair (j,k), j < k
};

inline std::vector<Root> positive_roots(int n) {
  std::vector<Root> roots;
  roots.reserve(n * (n - 1) / 2);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) roots.push_back({j, k});
  return roots;
}

inline cmat root_vector(int n, const Root& a) {
  cmat e = cmat::Zero(n, n);
  e(a.j, a.k) = 1.0;
  return e;
}

inline constexpr double kRootLengthSq = 2.0;  // |alpha|^2 under tr(XY)

inline double root_apply(const Root& a, const rvec& q) { return q[a.j] - q[a.k]; }

// ---------------------------------------------------------------------------
// Dual bases.

/// Finds, inside span(candidates), the basis dual to `basis` w.r.t. the
/// imaginary-trace pairing. Throws if the mutual Gram matrix is singular.
inline std::vector<cmat> dual_basis(const std::vector<cmat>& basis,
                                    const std::vector<cmat>& candidates) {
  require(!basis.empty() && basis.size() == candidates.size(),
          "dual_basis: basis/candidate size mismatch");
  const int m = static_cast<int>(basis.size());
  Eigen::MatrixXd gram(m, m);
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) gram(a, c) = pairing(basis[a], candidates[c]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (!lu.isInvertible()) throw std::domain_error("dual_basis: degenerate basis (singular Gram)");
  Eigen::MatrixXd coef = lu.inverse();  // dual_a = sum_c coef(c,a)? see below
  // want <basis_a, dual_b> = delta_ab with dual_b = sum_c M(b,c) candidates_c:
  // sum_c gram(a,c) M(b,c) = delta_ab  =>  M = (gram^T)^{-1} row-wise.
  Eigen::MatrixXd M = gram.transpose().fullPivLu().inverse();
  std::vector<cmat> duals(m);
  const int n = static_cast<int>(basis[0].rows());
  for (int b = 0; b < m; ++b) {
    cmat d = cmat::Zero(n, n);
    for (int c = 0; c < m; ++c) d += M(b, c) * candidates[c];
    duals[b] = d;
  }
  return duals;
}

// ---------------------------------------------------------------------------
// Cached basis tables per dimension.

struct LieBasis {
  int n = 0;

  std::vector<cmat> g;      // su(n)
  std::vector<cmat> b;      // borel: strictly upper complex + real diagonal
  std::vector<cmat> g0;     // i * (real traceless diagonal)
  std::vector<cmat> b0;     // real traceless diagonal
  std::vector<cmat> bplus;  // strictly upper
  std::vector<cmat> gperp;  // su(n), zero diagonal
  std::vector<cmat> full;   // g followed by b

  std::vector<cmat> g_dual;      // in borel
  std::vector<cmat> b_dual;      // in su(n)
  std::vector<cmat> g0_dual;     // in b0
  std::vector<cmat> b0_dual;     // in g0
  std::vector<cmat> bplus_dual;  // in gperp
  std::vector<cmat> gperp_dual;  // in bplus
  std::vector<cmat> full_dual;

  std::vector<Root> roots;

  static const LieBasis& get(int n);
};

namespace detail {

inline std::vector<cmat> diag_traceless_basis(int n, cplx unit) {
  // H_d = E_dd - E_{d+1,d+1}, d = 0..n-2, scaled by `unit`.
  std::vector<cmat> out;
  for (int d = 0; d + 1 < n; ++d) {
    cmat h = cmat::Zero(n, n);
    h(d, d) = unit;
    h(d + 1, d + 1) = -unit;
    out.push_back(h);
  }
  return out;
}

inline LieBasis build_basis(int n) {
  require(n >= 2, "LieBasis: dimension must be >= 2");
  LieBasis t;
  t.n = n;
  t.roots = positive_roots(n);
  const cplx I(0.0, 1.0);

  for (const auto& r : t.roots) {
    cmat e = root_vector(n, r);
    cmat et = e.transpose();
    t.gperp.push_back(e - et);
    t.gperp.push_back(I * (e + et));
    t.bplus.push_back(e);
    t.bplus.push_back(I * e);
  }
  t.g0 = diag_traceless_basis(n, I);
  t.b0 = diag_traceless_basis(n, 1.0);

  t.g = t.gperp;
  t.g.insert(t.g.end(), t.g0.begin(), t.g0.end());
  t.b = t.bplus;
  t.b.insert(t.b.end(), t.b0.begin(), t.b0.end());

  t.full = t.g;
  t.full.insert(t.full.end(), t.b.begin(), t.b.end());

  t.g_dual = dual_basis(t.g, t.b);
  t.b_dual = dual_basis(t.b, t.g);
  t.g0_dual = dual_basis(t.g0, t.b0);
  t.b0_dual = dual_basis(t.b0, t.g0);
  t.bplus_dual = dual_basis(t.bplus, t.gperp);
  t.gperp_dual = dual_basis(t.gperp, t.bplus);
  t.full_dual = dual_basis(t.full, t.full);
  return t;
}

}  // namespace detail

inline const LieBasis& LieBasis::get(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<LieBasis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, std::make_unique<LieBasis>(detail::build_basis(n))).first;
  return *it->second;
}

/// Reconstructs sum_a coeffs[a] * duals[a].
inline cmat reconstruct(const std::vector<double>& coeffs, const std::vector<cmat>& duals) {
  cmat out = cmat::Zero(duals[0].rows(), duals[0].cols());
  for (size_t a = 0; a < coeffs.size(); ++a) out += coeffs[a] * duals[a];
  return out;
}

// ---------------------------------------------------------------------------
// Structured exponentials and logarithms.

/// Exact exponential of a nilpotent (strictly triangular) matrix.
inline cmat exp_nilpotent(const cmat& x) {
  const int n = static_cast<int>(x.rows());
  cmat term = cmat::Identity(n, n);
  cmat sum = term;
  for (int k = 1; k < n; ++k) {
    term = (term * x) / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

/// Exact logarithm of a unipotent (unit diagonal, triangular) matrix.
inline cmat log_unipotent(const cmat& u) {
  const int n = static_cast<int>(u.rows());
  const cmat x = u - cmat::Identity(n, n);
  cmat term = x;
  cmat sum = cmat::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    sum += term / static_cast<double>(k) * ((k % 2 == 1) ? 1.0 : -1.0);
    term = term * x;
  }
  return sum;
}

/// exp of a Hermitian matrix through its eigendecomposition.
inline cmat exp_hermitian(const cmat& x) {
  Eigen::SelfAdjointEigenSolver<cmat> es(x);
  return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
         es.eigenvectors().adjoint();
}

/// exp of a skew-Hermitian matrix (result is unitary).
inline cmat exp_skew(const cmat& x) {
  Eigen::SelfAdjointEigenSolver<cmat> es(cmat(cplx(0, -1) * x));
  cvec phases = (cplx(0, 1) * es.eigenvalues()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

enum class SubspaceTag { DiagReal, StrictUpper, Hermitian, SkewHermitian };

/// Subspace-aware exponential: finite series on the nilpotent part,
/// eigendecomposition on the (skew-)Hermitian parts, plain exp on diagonals.
inline cmat exp_algebra(const cmat& x, SubspaceTag tag) {
  switch (tag) {
    case SubspaceTag::DiagReal: {
      require(is_real_diagonal(x), "exp_algebra: expected real diagonal");
      cmat out = cmat::Zero(x.rows(), x.cols());
      for (int i = 0; i < x.rows(); ++i) out(i, i) = std::exp(x(i, i).real());
      return out;
    }
    case SubspaceTag::StrictUpper:
      require(is_strictly_upper(x), "exp_algebra: expected strictly upper triangular");
      return exp_nilpotent(x);
    case SubspaceTag::Hermitian:
      require(is_hermitian(x), "exp_algebra: expected Hermitian");
      return exp_hermitian(x);
    case SubspaceTag::SkewHermitian:
      require(is_skew_hermitian(x), "exp_algebra: expected skew-Hermitian");
      return exp_skew(x);
  }
  throw std::logic_error("exp_algebra: unknown tag");
}

namespace detail {

inline bool strictly_triangular(const cmat& x) {
  const int n = static_cast<int>(x.rows());
  bool up = true, low = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i >= j && x(i, j) != 0.0) up = false;
      if (i <= j && x(i, j) != 0.0) low = false;
    }
  return up || low;
}

inline bool diagonal_only(const cmat& x) {
  const int n = static_cast<int>(x.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && x(i, j) != 0.0) return false;
  return true;
}

}  // namespace detail

/// Structural dispatch used by the derivative engine; all Lie-basis
/// directions hit one of the exact branches.
inline cmat exp_any(const cmat& x) {
  if (detail::diagonal_only(x)) {
    cmat out = cmat::Zero(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i) out(i, i) = std::exp(x(i, i));
    return out;
  }
  if (detail::strictly_triangular(x)) return exp_nilpotent(x);
  if ((x + x.adjoint()).norm() == 0.0) return exp_skew(x);
  if ((x - x.adjoint()).norm() == 0.0) return exp_hermitian(x);
  return exp_general(x);
}

}  // namespace hdlab
