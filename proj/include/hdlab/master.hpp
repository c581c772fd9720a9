#pragma once

// The integrable system of free motion on unitary x positive Hermitian:
// spectral Hamiltonians, the exact flow, the constants-of-motion map, and
// numerical rank evidence for its degenerate integrability.

#include "hdlab/brackets.hpp"
#include "hdlab/observable.hpp"

#include <Eigen/SVD>

namespace hdlab {

/// Conjugation-invariant observable phi(L) = sum_k c_k tr(L^k) on the
/// positive Hermitian cone, with its analytic algebra-valued derivative
/// 2 i k (L^k - (tr L^k / n) I) per term.
struct SpectralFn {
  std::vector<std::pair<int, double>> terms;  // (power k != 0, coefficient)

  double eval(const cmat& L) const {
    double v = 0.0;
    for (auto [k, c] : terms) v += c * power_trace(L, k).real();
    return v;
  }

  cmat grad(const cmat& L) const {
    const int n = static_cast<int>(L.rows());
    cmat g = cmat::Zero(n, n);
    for (auto [k, c] : terms) {
      cmat lk = matrix_power(L, k);
      g += c * 2.0 * static_cast<double>(k) * cplx(0, 1) * traceless(lk);
    }
    return g;
  }

  ObsP as_observable() const {
    SpectralFn self = *this;
    ObsP obs;
    obs.eval = [self](const cmat& L) { return self.eval(L); };
    obs.analytic = [self](const cmat& L) { return GradP{self.grad(L)}; };
    return obs;
  }

  static cmat matrix_power(const cmat& L, int k) {
    const int n = static_cast<int>(L.rows());
    cmat base = k >= 0 ? L : cmat(L.inverse());
    cmat acc = cmat::Identity(n, n);
    for (int i = 0; i < std::abs(k); ++i) acc = acc * base;
    return acc;
  }

  static cplx power_trace(const cmat& L, int k) { return matrix_power(L, k).trace(); }
};

inline SpectralFn power_invariant(int k, double c = 1.0) { return SpectralFn{{{k, c}}}; }

/// Pullback of a spectral function through (g, L) -> L.
inline ObsGL pullback_invariant(const SpectralFn& phi) {
  ObsGL obs;
  obs.eval = [phi](const PairGL& x) { return phi.eval(x.L); };
  obs.analytic = [phi](const PairGL& x) {
    const int n = static_cast<int>(x.g.rows());
    return GradGL{cmat::Zero(n, n), cmat::Zero(n, n), phi.grad(x.L)};
  };
  return obs;
}

/// Exact integral curve of the Hamiltonian phi through (g0, L0):
/// (exp(t Dphi(L0)) g0, L0). No time stepping is involved.
inline PairGL free_flow(const SpectralFn& phi, const PairGL& x0, double t) {
  const cmat v = phi.grad(x0.L);
  return {cmat(exp_skew(cmat(t * v)) * x0.g), x0.L};
}

/// Constants of motion (g^{-1} L g, L); both components share a spectrum.
inline PairPP psi(const PairGL& x) {
  return {cmat(x.g.adjoint() * x.L * x.g), x.L};
}

/// Twist of the quasi-adjoint action read through the (g, L) model: at
/// (g, L) the group element eta acts by simultaneous conjugation with
/// Xi_R(eta beta_L)^{-1}, beta_L = Dress_{g^{-1}}(nu^{-1}(L))^{-1}.
inline cmat quasi_adjoint_twist(const cmat& eta, const PairGL& x) {
  const cmat beta_l = dress(x.g.adjoint(), nu_inverse(x.L)).inverse();
  return xi_right(eta * beta_l).adjoint();
}

inline PairGL quasi_adjoint_master(const cmat& eta, const PairGL& x) {
  const cmat tw = quasi_adjoint_twist(eta, x);
  return {cmat(tw * x.g * tw.adjoint()), cmat(tw * x.L * tw.adjoint())};
}

/// C_k(L1) - C_k(L2); vanishes identically on images of psi.
inline double casimir_difference(int k, const PairPP& pair) {
  return (SpectralFn::power_trace(pair.L1, k) - SpectralFn::power_trace(pair.L2, k)).real();
}

// ---------------------------------------------------------------------------
// Rank evidence.

struct RankReport {
  bool conclusive = false;
  int rank_flows = 0;       // span of the Hamiltonian vector fields
  int rank_constants = 0;   // span of the differentials of the constants
  int expected_flows = 0;   // n - 1
  int expected_constants = 0;  // 2(n^2-1) - (n-1)
  bool pass = false;
  double regularity_margin = 0.0;
};

namespace detail {

inline int numeric_rank(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) ++r;
  return r;
}

inline void fill_real_row(Eigen::MatrixXd& m, int row, int col0, const cmat& a) {
  const int n = static_cast<int>(a.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      m(row, col0 + 2 * (i * n + j)) = a(i, j).real();
      m(row, col0 + 2 * (i * n + j) + 1) = a(i, j).imag();
    }
}

}  // namespace detail

/// Numerical ranks of (a) the Hamiltonian vector fields of tr L^k,
/// k = 1..n-1, and (b) the differentials of the matrix-entry probes of the
/// constants-of-motion map, at one point. Inconclusive when L fails the
/// regularity gate.
inline RankReport rank_evidence(const PairGL& x, double svd_rel_tol = 1e-8,
                                double gap = kRegularityGap) {
  const int n = static_cast<int>(x.g.rows());
  RankReport rep;
  rep.expected_flows = n - 1;
  rep.expected_constants = 2 * (n * n - 1) - (n - 1);
  const auto reg = regularity(x.L, gap);
  rep.regularity_margin = reg.margin;
  if (!reg.regular) return rep;  // inconclusive
  rep.conclusive = true;

  // (a) vector fields (Dphi_k(L) g, 0), k = 1..n-1, flattened over R.
  Eigen::MatrixXd flows(n - 1, 4 * n * n);
  flows.setZero();
  for (int k = 1; k <= n - 1; ++k) {
    const cmat v = power_invariant(k).grad(x.L) * x.g;
    detail::fill_real_row(flows, k - 1, 0, v);  // L-block stays zero
  }
  rep.rank_flows = detail::numeric_rank(flows, svd_rel_tol);

  // (b) differentials of Re/Im entries of (g^{-1} L g, L) against a tangent
  // basis: unitary directions (Y g, 0) and cone directions (0, X L + L X^†).
  const auto& basis = LieBasis::get(n);
  const int dim = 2 * (n * n - 1);
  std::vector<std::pair<cmat, cmat>> dpsi;  // (d(L~), dL) per direction
  dpsi.reserve(dim);
  const cmat ginv = x.g.adjoint();
  for (const cmat& y : basis.g) {  // g(s) = e^{sY} g : dL~ = g^{-1} [L, Y] g
    dpsi.emplace_back(cmat(ginv * commutator(x.L, y) * x.g), cmat::Zero(n, n));
  }
  for (const cmat& xb : basis.b) {  // L(s) = e^{sX} L e^{sX^†}
    const cmat dl = xb * x.L + x.L * xb.adjoint();
    dpsi.emplace_back(cmat(ginv * dl * x.g), dl);
  }
  Eigen::MatrixXd diff(dim, 8 * n * n);
  diff.setZero();
  for (int d = 0; d < dim; ++d) {
    detail::fill_real_row(diff, d, 0, dpsi[d].first);
    detail::fill_real_row(diff, d, 4 * n * n, dpsi[d].second);
  }
  rep.rank_constants = detail::numeric_rank(diff, svd_rel_tol);

  rep.pass = rep.rank_flows == rep.expected_flows && rep.rank_constants == rep.expected_constants;
  return rep;
}

}  // namespace hdlab
