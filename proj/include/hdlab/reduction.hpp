#pragma once

// Reduction to the gauge slice: the dynamical r-matrix, both forms of the
// reduced Poisson bracket, the reduced vector field with its quadrature,
// the decoupling map zeta and its exact inverse, the decoupled bracket,
// and the residual Weyl-group action.

#include "hdlab/brackets.hpp"
#include "hdlab/master.hpp"
#include "hdlab/observable.hpp"
#include "hdlab/probes.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <optional>

namespace hdlab {

// ---------------------------------------------------------------------------
// Dynamical r-matrix.

struct DynamicalR {
  cmat Q;
  cmat coef;  // c_{jk} = (q_{jk}+1) / (2(q_{jk}-1)), q_{jk} = Q_j conj(Q_k); zero diagonal
};

inline DynamicalR make_dynamical_r(const cmat& Q, double gap = kRegularityGap) {
  const int n = static_cast<int>(Q.rows());
  const auto reg = regularity(Q, gap);
  if (!reg.regular) throw std::domain_error("make_dynamical_r: torus element is not regular");
  DynamicalR r{Q, cmat::Zero(n, n)};
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const cplx q = Q(j, j) * std::conj(Q(k, k));
      r.coef(j, k) = 0.5 * (q + 1.0) / (q - 1.0);
    }
  return r;
}

/// Acts entrywise off the diagonal and annihilates the Cartan part; equals
/// (Ad_Q + id)(Ad_Q - id)^{-1}/2 on the off-Cartan subspace.
inline cmat r_apply(const DynamicalR& r, const cmat& x) {
  const int n = static_cast<int>(x.rows());
  cmat y = cmat::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (j != k) y(j, k) = r.coef(j, k) * x(j, k);
  return y;
}

// ---------------------------------------------------------------------------
// Reduced Poisson brackets.

/// Bracket on torus-invariant observables of the slice (Q, L).
inline double reduced_bracket_slice(const ObsSlice& F, const ObsSlice& H, const SlicePoint& x) {
  const DynamicalR r = make_dynamical_r(x.Q);
  const GradSlice f = grad_slice(F, x), h = grad_slice(H, x);
  return detail::skew_eval(f, h, [&](const GradSlice& a, const GradSlice& c) {
    return pairing(a.dQ, c.d2) - pairing(c.dQ, a.d2) +
           pairing(r_apply(r, manin_g(c.d2)), manin_b(a.d2)) -
           pairing(manin_b(c.d2), r_apply(r, manin_g(a.d2)));
  });
}

/// Equivalent form of the reduced bracket on the (Q, b) model of the slice.
inline double reduced_bracket_gb(const ObsSliceGB& F, const ObsSliceGB& H, const SliceGB& x) {
  const DynamicalR r = make_dynamical_r(x.Q);
  const GradSliceGB f = grad_slice_gb(F, x), h = grad_slice_gb(H, x);
  const cmat binv = x.b.inverse();
  return detail::skew_eval(f, h, [&](const GradSliceGB& a, const GradSliceGB& c) {
    return pairing(a.dQ, c.d2_left) - pairing(c.dQ, a.d2_left) +
           pairing(r_apply(r, cmat(x.b * c.d2_right * binv)), x.b * a.d2_right * binv);
  });
}

/// Reduced Hamiltonian vector field of a spectral invariant at a slice
/// point: the torus component (Dphi(L))_0 Q and the cone component
/// [R(Q) Dphi(L), L].
inline std::pair<cmat, cmat> reduced_vf(const SpectralFn& phi, const SlicePoint& x) {
  const DynamicalR r = make_dynamical_r(x.Q);
  const cmat v = phi.grad(x.L);
  return {cmat(cartan_part(v) * x.Q), commutator(r_apply(r, v), x.L)};
}

// ---------------------------------------------------------------------------
// Quadrature along the reduced flow.

struct QuadratureOptions {
  bool gauge_correction = false;  // diagonal correction restoring the exact field
  double gap = kRegularityGap;
  double min_overlap = 0.8;  // eigenvector matching threshold per step
  int max_subdivisions = 16;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<SlicePoint> pts;
  std::vector<cmat> frame;           // tracked diagonalizing unitaries
  std::optional<size_t> breakpoint;  // grid index where tracking stopped
};

namespace detail {

struct EigTrack {
  cmat U;     // orthonormal columns
  cvec vals;  // matching diagonal entries
};

inline double min_chordal_gap(const cvec& v) {
  double g = 1e300;
  for (int j = 0; j < v.size(); ++j)
    for (int k = j + 1; k < v.size(); ++k) g = std::min(g, std::abs(v[j] - v[k]));
  return g;
}

/// Schur-based eigensystem of a unitary matrix with columns matched to a
/// previous frame by maximal overlap and phases fixed so each matched
/// overlap is real positive. A step is rejected when the overlap matrix
/// strays from a permutation or when a matched eigenvalue moves across a
/// sizeable fraction of the previous spectral gap (which would silently
/// swap branches at an avoided crossing).
inline std::optional<EigTrack> track_step(const cmat& M, const EigTrack& prev,
                                          double min_overlap) {
  const int n = static_cast<int>(M.rows());
  Eigen::ComplexSchur<cmat> schur(M);
  cmat U = schur.matrixU();
  cvec vals = schur.matrixT().diagonal();

  const cmat overlap = prev.U.adjoint() * U;
  const double val_budget = 0.45 * min_chordal_gap(prev.vals);
  std::vector<int> pick(n, -1);
  std::vector<bool> used(n, false);
  for (int col = 0; col < n; ++col) {
    int best = -1;
    double bestmag = 0.0;
    for (int row = 0; row < n; ++row) {
      const double m = std::abs(overlap(row, col));
      if (!used[row] && m > bestmag) {
        bestmag = m;
        best = row;
      }
    }
    if (best < 0 || bestmag < min_overlap) return std::nullopt;
    if (std::abs(vals[col] - prev.vals[best]) > val_budget) return std::nullopt;
    used[best] = true;
    pick[col] = best;  // new column `col` continues old column `best`
  }

  EigTrack out;
  out.U = cmat::Zero(n, n);
  out.vals = cvec(n);
  for (int col = 0; col < n; ++col) {
    const int slot = pick[col];
    cplx z = overlap(slot, col);
    z /= std::abs(z);
    out.U.col(slot) = U.col(col) * std::conj(z);
    out.vals[slot] = vals[col];
  }
  return out;
}

inline cmat diag_from(const cvec& v) {
  cmat d = cmat::Zero(v.size(), v.size());
  for (int i = 0; i < v.size(); ++i) d(i, i) = v[i];
  return d;
}

}  // namespace detail

/// Integral curve of the reduced vector field through (Q0, L0): the unitary
/// exp(t Dphi(L0)) Q0 is diagonalized with continuity tracking, giving
/// Q(t) and the conjugating frame for L(t). The optional diagonal gauge
/// correction (a cumulative trapezoid integral) makes the curve follow the
/// reduced field exactly rather than up to a torus gauge motion.
inline Trajectory quadrature_integrate(const SpectralFn& phi, const SlicePoint& x0,
                                       const std::vector<double>& tgrid,
                                       const QuadratureOptions& opt = {}) {
  require(!tgrid.empty(), "quadrature_integrate: empty time grid");
  const int n = static_cast<int>(x0.Q.rows());
  if (!regularity(x0.Q, opt.gap).regular)
    throw std::domain_error("quadrature_integrate: initial torus element is not regular");

  const cmat A = phi.grad(x0.L);
  Trajectory traj;
  traj.t = tgrid;

  detail::EigTrack state{cmat::Identity(n, n), x0.Q.diagonal()};
  double prev_t = 0.0;

  for (size_t i = 0; i < tgrid.size(); ++i) {
    const double t = tgrid[i];
    // walk from prev_t to t, subdividing when the frame rotates too fast
    // or an eigenvalue branch would be left
    std::optional<detail::EigTrack> step;
    double from = prev_t;
    int guard = 0;
    while (true) {
      const cmat M = exp_skew(cmat(t * A)) * x0.Q;
      step = detail::track_step(M, state, opt.min_overlap);
      if (step) break;
      double mid = 0.5 * (from + t);
      bool advanced = false;
      for (int depth = 0; depth < opt.max_subdivisions; ++depth, mid = 0.5 * (from + mid)) {
        const cmat Mm = exp_skew(cmat(mid * A)) * x0.Q;
        auto sub = detail::track_step(Mm, state, opt.min_overlap);
        if (sub) {
          state = *sub;
          from = mid;
          advanced = true;
          break;
        }
      }
      if (!advanced || ++guard > 256) break;
    }
    if (!step || detail::min_chordal_gap(step->vals) <= opt.gap) {
      traj.breakpoint = i;
      traj.t.resize(i);
      break;
    }
    state = *step;
    prev_t = t;
    const cmat eta1 = state.U.adjoint();
    traj.frame.push_back(eta1);
    traj.pts.push_back({detail::diag_from(state.vals), cmat(eta1 * x0.L * eta1.adjoint())});
  }

  if (opt.gauge_correction && traj.pts.size() >= 2) {
    // omega(t) = (d(eta1)/dt eta1^{-1})_0 + (Dphi(L1(t)))_0 / 2, integrated
    // by a cumulative trapezoid; conjugation by exp(-integral) follows.
    const size_t m = traj.pts.size();
    std::vector<cmat> omega(m);
    for (size_t i = 0; i < m; ++i) {
      const size_t lo = (i == 0) ? 0 : i - 1;
      const size_t hi = (i + 1 == m) ? i : i + 1;
      const double dt = traj.t[hi] - traj.t[lo];
      const cmat deta = (traj.frame[hi] - traj.frame[lo]) / dt;
      const cmat z = deta * traj.frame[i].adjoint();
      cmat w = cmat::Zero(n, n);
      for (int d = 0; d < n; ++d) w(d, d) = cplx(0, z(d, d).imag());
      const cmat v = phi.grad(traj.pts[i].L);
      omega[i] = w + 0.5 * cartan_part(v);
    }
    cmat accum = cmat::Zero(n, n);
    for (size_t i = 0; i < m; ++i) {
      if (i > 0) accum += 0.5 * (traj.t[i] - traj.t[i - 1]) * (omega[i] + omega[i - 1]);
      cmat eta0 = cmat::Zero(n, n);
      for (int d = 0; d < n; ++d) eta0(d, d) = std::exp(-accum(d, d));
      traj.pts[i].L = eta0 * traj.pts[i].L * eta0.adjoint();
      traj.frame[i] = eta0 * traj.frame[i];
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Decoupling map.

/// (Q, b) -> (Q, p, lambda) with b = e^p b_+ and lambda = b_+^{-1} Q^{-1} b_+ Q.
inline DecoupledPoint zeta_forward(const SliceGB& x) {
  const auto s = split_borel(x.b);
  const cmat qinv = x.Q.adjoint();
  return {x.Q, s.p, cmat(s.b_plus.inverse() * qinv * s.b_plus * x.Q)};
}

/// Solves b_+ lambda = Q^{-1} b_+ Q for the unit-diagonal factor. The system
/// is linear band-by-band in the distance k - j:
/// (b_+)_{jk} (conj(Q_j) Q_k - 1) = sum_{j <= m < k} (b_+)_{jm} lambda_{mk}.
inline cmat zeta_solve_bplus(const cmat& Q, const cmat& lam, double gap = kRegularityGap) {
  const int n = static_cast<int>(Q.rows());
  cmat b = cmat::Identity(n, n);
  for (int d = 1; d < n; ++d) {
    for (int j = 0; j + d < n; ++j) {
      const int k = j + d;
      const cplx denom = std::conj(Q(j, j)) * Q(k, k) - 1.0;
      if (std::abs(denom) <= gap)
        throw std::domain_error("zeta_solve_bplus: non-regular torus element");
      cplx rhs = 0.0;
      for (int m = j; m < k; ++m) rhs += b(j, m) * lam(m, k);
      b(j, k) = rhs / denom;
    }
  }
  return b;
}

inline SliceGB zeta_inverse(const DecoupledPoint& x, double gap = kRegularityGap) {
  require(is_unipotent_upper(x.lam, 1e-8), "zeta_inverse: spin variable must be unipotent");
  const cmat bplus = zeta_solve_bplus(x.Q, x.lam, gap);
  return {x.Q, cmat(exp_algebra(x.p, SubspaceTag::DiagReal) * bplus)};
}

// ---------------------------------------------------------------------------
// Decoupled and linearized brackets.

/// Canonical (Q, p) block plus the quadratic spin block on the unipotent
/// variable; dressing-invariant functions of the spin alone are central.
inline double decoupled_bracket(const ObsDec& F, const ObsDec& H, const DecoupledPoint& x) {
  const GradDec f = grad_decoupled(F, x), h = grad_decoupled(H, x);
  const cmat lam_inv = x.lam.inverse();
  return detail::skew_eval(f, h, [&](const GradDec& a, const GradDec& c) {
    return pairing(a.dQ, c.dp) - pairing(c.dQ, a.dp) +
           pairing(x.lam * a.dl_right * lam_inv, c.dl_left);
  });
}

/// Scaling limit of the decoupled bracket: canonical block plus the
/// Lie-Poisson block on the strictly-upper spin variable.
inline double linear_spin_bracket(const ObsLin& F, const ObsLin& H, const LinearSpinPoint& x) {
  const GradLin f = grad_linear_spin(F, x), h = grad_linear_spin(H, x);
  return detail::skew_eval(f, h, [&](const GradLin& a, const GradLin& c) {
    return pairing(a.dQ, c.dp) - pairing(c.dQ, a.dp) + pairing(x.X, commutator(a.dX, c.dX));
  });
}

// ---------------------------------------------------------------------------
// Residual discrete gauge action.

/// Permutation matrix with determinant fixed to +1 by a sign flip on the
/// first row; lies in the normalizer of the diagonal torus.
inline cmat signed_permutation(const std::vector<int>& perm, int n) {
  require(static_cast<int>(perm.size()) == n, "signed_permutation: size mismatch");
  cmat P = cmat::Zero(n, n);
  for (int i = 0; i < n; ++i) P(i, perm[i]) = 1.0;
  if (P.determinant().real() < 0.0) P.row(0) *= -1.0;
  return P;
}

inline SlicePoint weyl_act(const std::vector<int>& perm, const SlicePoint& x) {
  const cmat P = signed_permutation(perm, static_cast<int>(x.Q.rows()));
  return {cmat(P * x.Q * P.adjoint()), cmat(P * x.L * P.adjoint())};
}

inline SliceGB weyl_act(const std::vector<int>& perm, const SliceGB& x) {
  const cmat P = signed_permutation(perm, static_cast<int>(x.Q.rows()));
  return {cmat(P * x.Q * P.adjoint()), dress(P, x.b)};
}

/// Transported through the decoupling map; no closed form exists for the
/// permutation action on the decoupled variables.
inline DecoupledPoint weyl_act(const std::vector<int>& perm, const DecoupledPoint& x) {
  return zeta_forward(weyl_act(perm, zeta_inverse(x)));
}

struct AlcoveResult {
  std::vector<int> perm;  // sorts the phases increasingly in (-pi, pi]
  bool tie = false;       // equal phases broken by index order
};

inline AlcoveResult alcove_permutation(const cmat& Q) {
  const int n = static_cast<int>(Q.rows());
  std::vector<double> phase(n);
  for (int i = 0; i < n; ++i) phase[i] = std::arg(Q(i, i));
  AlcoveResult res;
  res.perm.resize(n);
  std::iota(res.perm.begin(), res.perm.end(), 0);
  std::stable_sort(res.perm.begin(), res.perm.end(),
                   [&](int a, int b) { return phase[a] < phase[b]; });
  for (int i = 0; i + 1 < n; ++i) res.tie = res.tie || phase[res.perm[i]] == phase[res.perm[i + 1]];
  return res;
}

}  // namespace hdlab
