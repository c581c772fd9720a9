#pragma once

// Observables on the phase-space models and the directional-derivative
// machinery that turns them into subspace-valued gradients. Derivatives are
// sampled along one-parameter group curves and reconstructed through the
// cached dual bases; analytic closures bypass the sampling.

#include "hdlab/algebra.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace hdlab {

// ---------------------------------------------------------------------------
// Points of the composite models.

struct PairGB {  // unitary x Borel
  cmat g, b;
};

struct PairGL {  // unitary x positive Hermitian (master phase space)
  cmat g, L;
};

struct PairBB {
  cmat b1, b2;
};

struct PairPP {  // sign-flipped bracket on the first slot
  cmat L1, L2;
};

struct SlicePoint {  // regular diagonal torus element x positive Hermitian
  cmat Q, L;
};

struct SliceGB {
  cmat Q, b;
};

struct DecoupledPoint {  // (Q, p, lambda): positions, momenta, unipotent spin
  cmat Q, p, lam;
};

struct LinearSpinPoint {  // (Q, p, X) with X strictly upper
  cmat Q, p, X;
};

// ---------------------------------------------------------------------------
// Finite differences.

struct FdSpec {
  double h = 1e-4;
  bool richardson = true;
};

template <class F>
double fd_derivative(F&& f, const FdSpec& s = {}) {
  if (!(s.h > 0.0)) throw std::invalid_argument("fd_derivative: step must be positive");
  const double h = s.h;
  const double d1 = (f(h) - f(-h)) / (2.0 * h);
  if (!s.richardson) return d1;
  const double d2 = (f(h / 2) - f(-h / 2)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

/// Matrix-valued central difference (same stencil as fd_derivative).
template <class F>
cmat fd_derivative_matrix(F&& f, const FdSpec& s = {}) {
  const double h = s.h;
  cmat d1 = (f(h) - f(-h)) / (2.0 * h);
  if (!s.richardson) return d1;
  cmat d2 = (f(h / 2) - f(-h / 2)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

// ---------------------------------------------------------------------------
// Gradient bundles. Components live in the subspaces fixed by the
// derivative conventions of each manifold.

struct GradM {  // functions on SL(n,C); both components in the full algebra
  cmat left, right;
};

struct GradG {  // functions on SU(n); components in the Borel subalgebra
  cmat left, right;
};

struct GradB {  // functions on the Borel group; components in su(n)
  cmat left, right;
};

struct GradP {  // functions on the positive Hermitian cone; full algebra
  cmat full;
};

struct GradGL {
  cmat d1_left, d1_right;  // in Borel
  cmat d2;                 // full algebra
};

struct GradGB {
  cmat d1_left, d1_right;  // in Borel
  cmat d2_left, d2_right;  // in su(n)
};

struct GradSlice {
  cmat dQ;  // real diagonal traceless
  cmat d2;  // full algebra
};

struct GradSliceGB {
  cmat dQ;
  cmat d2_left, d2_right;  // in su(n)
};

struct GradDec {
  cmat dQ;                 // real diagonal traceless
  cmat dp;                 // i * real diagonal traceless
  cmat dl_left, dl_right;  // skew-Hermitian, zero diagonal
};

struct GradLin {
  cmat dQ, dp;
  cmat dX;  // skew-Hermitian, zero diagonal
};

struct GradBB {
  GradB first, second;
};

struct GradPP {
  GradP first, second;
};

// ---------------------------------------------------------------------------
// Observables.

template <class P, class Bundle>
struct Observable {
  std::function<double(const P&)> eval;
  std::function<Bundle(const P&)> analytic;  // empty -> finite differences
  FdSpec fd{};

  double operator()(const P& x) const { return eval(x); }
};

using ObsM = Observable<cmat, GradM>;
using ObsG = Observable<cmat, GradG>;
using ObsB = Observable<cmat, GradB>;
using ObsP = Observable<cmat, GradP>;
using ObsGL = Observable<PairGL, GradGL>;
using ObsGB = Observable<PairGB, GradGB>;
using ObsSlice = Observable<SlicePoint, GradSlice>;
using ObsSliceGB = Observable<SliceGB, GradSliceGB>;
using ObsDec = Observable<DecoupledPoint, GradDec>;
using ObsLin = Observable<LinearSpinPoint, GradLin>;
using ObsBB = Observable<PairBB, GradBB>;
using ObsPP = Observable<PairPP, GradPP>;

// ---------------------------------------------------------------------------
// Reconstruction helpers.

namespace detail {

/// coeffs[a] = d/dt f(curve(basis[a], t)) reconstructed against `duals`.
template <class Eval, class Curve>
cmat sampled_gradient(Eval&& f, Curve&& curve, const std::vector<cmat>& basis,
                      const std::vector<cmat>& duals, const FdSpec& fd) {
  std::vector<double> coeffs(basis.size());
  for (size_t a = 0; a < basis.size(); ++a)
    coeffs[a] = fd_derivative([&](double t) { return f(curve(basis[a], t)); }, fd);
  return reconstruct(coeffs, duals);
}

inline void check_finite(const cmat& m, const char* what) {
  if (!m.allFinite()) throw std::domain_error(std::string(what) + ": non-finite derivative");
}

}  // namespace detail

// Left/right derivatives of a function on SL(n,C), values in the full
// realified algebra.
inline GradM grad_double(const ObsM& f, const cmat& K) {
  if (f.analytic) return f.analytic(K);
  const auto& t = LieBasis::get(static_cast<int>(K.rows()));
  GradM g;
  g.left = detail::sampled_gradient(
      f.eval, [&](const cmat& z, double s) { return cmat(exp_any(cmat(s * z)) * K); }, t.full,
      t.full_dual, f.fd);
  g.right = detail::sampled_gradient(
      f.eval, [&](const cmat& z, double s) { return cmat(K * exp_any(cmat(s * z))); }, t.full,
      t.full_dual, f.fd);
  detail::check_finite(g.left, "grad_double");
  return g;
}

// Borel-valued derivatives of a function on SU(n).
inline GradG grad_unitary(const ObsG& f, const cmat& g0) {
  if (f.analytic) return f.analytic(g0);
  const auto& t = LieBasis::get(static_cast<int>(g0.rows()));
  GradG g;
  g.left = detail::sampled_gradient(
      f.eval, [&](const cmat& y, double s) { return cmat(exp_any(cmat(s * y)) * g0); }, t.g,
      t.g_dual, f.fd);
  g.right = detail::sampled_gradient(
      f.eval, [&](const cmat& y, double s) { return cmat(g0 * exp_any(cmat(s * y))); }, t.g,
      t.g_dual, f.fd);
  return g;
}

// su(n)-valued derivatives of a function on the Borel group.
inline GradB grad_borel(const ObsB& f, const cmat& b) {
  if (f.analytic) return f.analytic(b);
  const auto& t = LieBasis::get(static_cast<int>(b.rows()));
  GradB g;
  g.left = detail::sampled_gradient(
      f.eval, [&](const cmat& x, double s) { return cmat(exp_any(cmat(s * x)) * b); }, t.b,
      t.b_dual, f.fd);
  g.right = detail::sampled_gradient(
      f.eval, [&](const cmat& x, double s) { return cmat(b * exp_any(cmat(s * x))); }, t.b,
      t.b_dual, f.fd);
  return g;
}

// Full-algebra-valued derivative on the positive Hermitian cone: Borel
// curves e^{tX} L e^{tX^†} fix the su(n) component, unitary curves
// e^{tY} L e^{-tY} fix the Borel component.
inline GradP grad_posherm(const ObsP& f, const cmat& L) {
  if (f.analytic) return f.analytic(L);
  const auto& t = LieBasis::get(static_cast<int>(L.rows()));
  cmat part_g = detail::sampled_gradient(
      f.eval,
      [&](const cmat& x, double s) {
        cmat e = exp_any(cmat(s * x));
        return cmat(e * L * e.adjoint());
      },
      t.b, t.b_dual, f.fd);
  cmat part_b = detail::sampled_gradient(
      f.eval,
      [&](const cmat& y, double s) {
        cmat e = exp_any(cmat(s * y));
        return cmat(e * L * e.adjoint());  // e^{-tY} = (e^{tY})^† for Y in su(n)
      },
      t.g, t.g_dual, f.fd);
  GradP g;
  g.full = part_g + part_b;
  return g;
}

inline GradGL grad_master(const ObsGL& f, const PairGL& x) {
  if (f.analytic) return f.analytic(x);
  const auto& t = LieBasis::get(static_cast<int>(x.g.rows()));
  GradGL g;
  g.d1_left = detail::sampled_gradient(
      [&](const cmat& gg) { return f.eval({gg, x.L}); },
      [&](const cmat& y, double s) { return cmat(exp_any(cmat(s * y)) * x.g); }, t.g, t.g_dual,
      f.fd);
  g.d1_right = detail::sampled_gradient(
      [&](const cmat& gg) { return f.eval({gg, x.L}); },
      [&](const cmat& y, double s) { return cmat(x.g * exp_any(cmat(s * y))); }, t.g, t.g_dual,
      f.fd);
  ObsP second{[&](const cmat& LL) { return f.eval({x.g, LL}); }, nullptr, f.fd};
  g.d2 = grad_posherm(second, x.L).full;
  return g;
}

inline GradGB grad_gb(const ObsGB& f, const PairGB& x) {
  if (f.analytic) return f.analytic(x);
  const auto& t = LieBasis::get(static_cast<int>(x.g.rows()));
  GradGB g;
  g.d1_left = detail::sampled_gradient(
      [&](const cmat& gg) { return f.eval({gg, x.b}); },
      [&](const cmat& y, double s) { return cmat(exp_any(cmat(s * y)) * x.g); }, t.g, t.g_dual,
      f.fd);
  g.d1_right = detail::sampled_gradient(
      [&](const cmat& gg) { return f.eval({gg, x.b}); },
      [&](const cmat& y, double s) { return cmat(x.g * exp_any(cmat(s * y))); }, t.g, t.g_dual,
      f.fd);
  g.d2_left = detail::sampled_gradient(
      [&](const cmat& bb) { return f.eval({x.g, bb}); },
      [&](const cmat& z, double s) { return cmat(exp_any(cmat(s * z)) * x.b); }, t.b, t.b_dual,
      f.fd);
  g.d2_right = detail::sampled_gradient(
      [&](const cmat& bb) { return f.eval({x.g, bb}); },
      [&](const cmat& z, double s) { return cmat(x.b * exp_any(cmat(s * z))); }, t.b, t.b_dual,
      f.fd);
  return g;
}

inline GradSlice grad_slice(const ObsSlice& f, const SlicePoint& x) {
  if (f.analytic) return f.analytic(x);
  const auto& t = LieBasis::get(static_cast<int>(x.Q.rows()));
  GradSlice g;
  g.dQ = detail::sampled_gradient(
      [&](const cmat& qq) { return f.eval({qq, x.L}); },
      [&](const cmat& y0, double s) { return cmat(exp_any(cmat(s * y0)) * x.Q); }, t.g0, t.g0_dual,
      f.fd);
  ObsP second{[&](const cmat& LL) { return f.eval({x.Q, LL}); }, nullptr, f.fd};
  g.d2 = grad_posherm(second, x.L).full;
  return g;
}

inline GradSliceGB grad_slice_gb(const ObsSliceGB& f, const SliceGB& x) {
  if (f.analytic) return f.analytic(x);
  const auto& t = LieBasis::get(static_cast<int>(x.Q.rows()));
  GradSliceGB g;
  g.dQ = detail::sampled_gradient(
      [&](const cmat& qq) { return f.eval({qq, x.b}); },
      [&](const cmat& y0, double s) { return cmat(exp_any(cmat(s * y0)) * x.Q); }, t.g0, t.g0_dual,
      f.fd);
  ObsB second{[&](const cmat& bb) { return f.eval({x.Q, bb}); }, nullptr, f.fd};
  auto gb = grad_borel(second, x.b);
  g.d2_left = gb.left;
  g.d2_right = gb.right;
  return g;
}

inline GradDec grad_decoupled(const ObsDec& f, const DecoupledPoint& x) {
  if (f.analytic) return f.analytic(x);
  const auto& t = LieBasis::get(static_cast<int>(x.Q.rows()));
  GradDec g;
  g.dQ = detail::sampled_gradient(
      [&](const cmat& qq) { return f.eval({qq, x.p, x.lam}); },
      [&](const cmat& y0, double s) { return cmat(x.Q * exp_any(cmat(s * y0))); }, t.g0, t.g0_dual,
      f.fd);
  g.dp = detail::sampled_gradient(
      [&](const cmat& pp) { return f.eval({x.Q, pp, x.lam}); },
      [&](const cmat& x0, double s) { return cmat(x.p + s * x0); }, t.b0, t.b0_dual, f.fd);
  g.dl_left = detail::sampled_gradient(
      [&](const cmat& ll) { return f.eval({x.Q, x.p, ll}); },
      [&](const cmat& z, double s) { return cmat(exp_nilpotent(cmat(s * z)) * x.lam); }, t.bplus,
      t.bplus_dual, f.fd);
  g.dl_right = detail::sampled_gradient(
      [&](const cmat& ll) { return f.eval({x.Q, x.p, ll}); },
      [&](const cmat& z, double s) { return cmat(x.lam * exp_nilpotent(cmat(s * z))); }, t.bplus,
      t.bplus_dual, f.fd);
  return g;
}

inline GradLin grad_linear_spin(const ObsLin& f, const LinearSpinPoint& x) {
  if (f.analytic) return f.analytic(x);
  const auto& t = LieBasis::get(static_cast<int>(x.Q.rows()));
  GradLin g;
  g.dQ = detail::sampled_gradient(
      [&](const cmat& qq) { return f.eval({qq, x.p, x.X}); },
      [&](const cmat& y0, double s) { return cmat(x.Q * exp_any(cmat(s * y0))); }, t.g0, t.g0_dual,
      f.fd);
  g.dp = detail::sampled_gradient(
      [&](const cmat& pp) { return f.eval({x.Q, pp, x.X}); },
      [&](const cmat& x0, double s) { return cmat(x.p + s * x0); }, t.b0, t.b0_dual, f.fd);
  g.dX = detail::sampled_gradient(
      [&](const cmat& xx) { return f.eval({x.Q, x.p, xx}); },
      [&](const cmat& z, double s) { return cmat(x.X + s * z); }, t.bplus, t.bplus_dual, f.fd);
  return g;
}

inline GradBB grad_pair_bb(const ObsBB& f, const PairBB& x) {
  if (f.analytic) return f.analytic(x);
  GradBB g;
  ObsB first{[&](const cmat& bb) { return f.eval({bb, x.b2}); }, nullptr, f.fd};
  ObsB second{[&](const cmat& bb) { return f.eval({x.b1, bb}); }, nullptr, f.fd};
  g.first = grad_borel(first, x.b1);
  g.second = grad_borel(second, x.b2);
  return g;
}

inline GradPP grad_pair_pp(const ObsPP& f, const PairPP& x) {
  if (f.analytic) return f.analytic(x);
  GradPP g;
  ObsP first{[&](const cmat& LL) { return f.eval({LL, x.L2}); }, nullptr, f.fd};
  ObsP second{[&](const cmat& LL) { return f.eval({x.L1, LL}); }, nullptr, f.fd};
  g.first = grad_posherm(first, x.L1);
  g.second = grad_posherm(second, x.L2);
  return g;
}

// ---------------------------------------------------------------------------
// Trace observables. Re/Im tr(A K^m) carries analytic left/right
// derivatives; everything else defaults to finite differences.

namespace detail {

inline cmat trace_mono_weight_left(const cmat& A, const cmat& K, int m) {
  // d/dt tr(A (e^{tX}K)^m) = tr(X W),  W = sum_{i=0}^{m-1} K^{m-i} A K^i
  const int n = static_cast<int>(K.rows());
  cmat W = cmat::Zero(n, n);
  std::vector<cmat> pow(m + 1);
  pow[0] = cmat::Identity(n, n);
  for (int i = 1; i <= m; ++i) pow[i] = pow[i - 1] * K;
  for (int i = 0; i < m; ++i) W += pow[m - i] * A * pow[i];
  return W;
}

}  // namespace detail

/// Re or Im of tr(A K^m) as an observable on SL(n,C).
inline ObsM trace_monomial_double(const cmat& A, int m, bool real_part) {
  ObsM obs;
  obs.eval = [A, m, real_part](const cmat& K) {
    cmat p = cmat::Identity(K.rows(), K.cols());
    for (int i = 0; i < m; ++i) p = p * K;
    const cplx t = (A * p).trace();
    return real_part ? t.real() : t.imag();
  };
  obs.analytic = [A, m, real_part](const cmat& K) {
    GradM g;
    cmat W = detail::trace_mono_weight_left(A, K, m);
    cmat Wp = K.inverse() * W * K;
    if (real_part) {
      g.left = cplx(0, 1) * traceless(W);
      g.right = cplx(0, 1) * traceless(Wp);
    } else {
      g.left = traceless(W);
      g.right = traceless(Wp);
    }
    return g;
  };
  return obs;
}

}  // namespace hdlab
