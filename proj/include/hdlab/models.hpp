#pragma once

// Physics layer: the spin Sutherland Hamiltonian, its relativistic parent
// on the decoupled variables, the epsilon-scaling limits connecting them,
// and the closed trigonometric Ruijsenaars-Schneider family obtained on a
// minimal-orbit leaf.

#include "hdlab/reduction.hpp"

#include <cmath>

namespace hdlab {

// ---------------------------------------------------------------------------
// Spin Sutherland.

struct SutherlandPoint {
  rvec q;  // positions (radians), sum zero
  rvec p;  // momenta, sum zero
  cmat X;  // spin, strictly upper triangular
};

inline cmat torus_from_angles(const rvec& q, double scale = 1.0) {
  const int n = static_cast<int>(q.size());
  cmat Q = cmat::Zero(n, n);
  for (int i = 0; i < n; ++i) Q(i, i) = std::exp(cplx(0, scale * q[i]));
  return Q;
}

inline cmat diag_from_real(const rvec& p) {
  const int n = static_cast<int>(p.size());
  cmat d = cmat::Zero(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = p[i];
  return d;
}

/// (1/2) tr p^2 + (1/16) sum_{j<k} |X_jk|^2 / sin^2((q_j - q_k)/2).
inline double spin_sutherland_energy(const SutherlandPoint& pt) {
  const int n = static_cast<int>(pt.q.size());
  double h = 0.5 * pt.p.squaredNorm();
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      const double s = std::sin(0.5 * (pt.q[j] - pt.q[k]));
      if (s == 0.0) throw std::domain_error("spin_sutherland_energy: singular configuration");
      h += std::norm(pt.X(j, k)) / (16.0 * s * s);
    }
  return h;
}

// ---------------------------------------------------------------------------
// Spin Ruijsenaars-Schneider energy on the decoupled variables.

/// Defining representation; the trace form fixes the normalization to one.
struct RepContext {
  int n = 2;
  double c_rho = 1.0;
  int dim_rho() const { return n; }
};

/// tr(e^p b_+ b_+^† e^p) with the unipotent factor recovered from the spin
/// variable lambda = exp(sigma) through the band recursion.
inline double spin_rs_energy(const RepContext& ctx, const cmat& Q, const cmat& p,
                             const cmat& sigma) {
  const cmat bplus = zeta_solve_bplus(Q, exp_nilpotent(sigma));
  const cmat ep = exp_algebra(p, SubspaceTag::DiagReal);
  const cmat b = ep * bplus;
  return ctx.c_rho * (b * b.adjoint()).trace().real();
}

// ---------------------------------------------------------------------------
// Scaling limits.

struct ScalingRow {
  double eps = 0.0;
  double err = 0.0;
  double ratio = 0.0;  // err at the previous (doubled) eps over this err
};

inline void fill_ratios(std::vector<ScalingRow>& rows) {
  for (size_t i = 1; i < rows.size(); ++i)
    rows[i].ratio = rows[i].err > 0.0 ? rows[i - 1].err / rows[i].err : 0.0;
}

/// True when every resolved consecutive ratio sits in [lo, hi]; rows at the
/// noise floor are skipped. The energy limit converges at first order
/// (ratio near 2); the bracket limit is even in the scale parameter and
/// converges at second order (ratio near 4).
inline bool scaling_converges(const std::vector<ScalingRow>& rows, double lo = 1.6,
                              double hi = 2.4, double floor = 1e-11) {
  bool ok = true;
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].err < floor || rows[i - 1].err < floor) continue;
    ok = ok && rows[i].ratio > lo && rows[i].ratio < hi;
  }
  return ok;
}

/// err(eps) = | (H_rs(Q, eps p, eps X) - n) / (4 eps^2) - H_suth |.
inline std::vector<ScalingRow> scaling_energy_table(const SutherlandPoint& pt,
                                                    const std::vector<double>& eps_list) {
  const int n = static_cast<int>(pt.q.size());
  const RepContext ctx{n, 1.0};
  const cmat Q = torus_from_angles(pt.q);
  const cmat p = diag_from_real(pt.p);
  const double target = spin_sutherland_energy(pt);
  std::vector<ScalingRow> rows;
  for (double e : eps_list) {
    const double h = spin_rs_energy(ctx, Q, cmat(e * p), cmat(e * pt.X));
    rows.push_back({e, std::abs((h - ctx.c_rho * ctx.dim_rho()) / (4.0 * e * e) - target), 0.0});
  }
  fill_ratios(rows);
  return rows;
}

/// err(eps) = | eps {f o mu^-1, h o mu^-1}_dec (mu_eps(pt)) - {f,h}_lin(pt) |.
inline std::vector<ScalingRow> scaling_bracket_table(const ObsLin& f, const ObsLin& h,
                                                     const LinearSpinPoint& pt,
                                                     const std::vector<double>& eps_list) {
  const double target = linear_spin_bracket(f, h, pt);
  std::vector<ScalingRow> rows;
  for (double e : eps_list) {
    auto shrink = [e](const ObsLin& o) {
      return ObsDec{[o, e](const DecoupledPoint& y) {
                      return o.eval({y.Q, cmat(y.p / e), cmat(log_unipotent(y.lam) / e)});
                    },
                    nullptr, o.fd};
    };
    const DecoupledPoint moved{pt.Q, cmat(e * pt.p), exp_nilpotent(cmat(e * pt.X))};
    const double val = e * decoupled_bracket(shrink(f), shrink(h), moved);
    rows.push_back({e, std::abs(val - target), 0.0});
  }
  fill_ratios(rows);
  return rows;
}

// ---------------------------------------------------------------------------
// Trigonometric Ruijsenaars-Schneider family (minimal-orbit leaf).

struct RsContext {
  int n = 2;
  double x = 1.0;  // coupling, nonzero
};

inline void rs_require(const RsContext& ctx) {
  require(ctx.x != 0.0, "rs: coupling must be nonzero");
  require(ctx.n >= 2, "rs: need at least two sites");
}

/// Unipotent orbit representative: entries (1 - e^{-x}) e^{(k-j)x/2} above
/// the diagonal; satisfies nu(-x) = nu(x)^{-1}.
inline cmat rs_nu_matrix(const RsContext& ctx) {
  rs_require(ctx);
  cmat v = cmat::Identity(ctx.n, ctx.n);
  for (int j = 0; j < ctx.n; ++j)
    for (int k = j + 1; k < ctx.n; ++k)
      v(j, k) = (1.0 - std::exp(-ctx.x)) * std::exp(0.5 * (k - j) * ctx.x);
  return v;
}

/// Diagonal orbit representative exp(diag((n-1)x/2, -x/2, ..., -x/2)).
inline cmat rs_delta(const RsContext& ctx) {
  rs_require(ctx);
  cmat d = cmat::Zero(ctx.n, ctx.n);
  d(0, 0) = std::exp(0.5 * (ctx.n - 1) * ctx.x);
  for (int i = 1; i < ctx.n; ++i) d(i, i) = std::exp(-0.5 * ctx.x);
  return d;
}

/// Closed-form unipotent factor solving b_+^{-1} Q^{-1} b_+ Q = nu(x)^{-1}
/// for a regular diagonal unitary Q.
inline cmat rs_bplus(const cmat& Q, const RsContext& ctx) {
  rs_require(ctx);
  const int n = ctx.n;
  cmat b = cmat::Identity(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      cplx acc = Q(k, k) * std::conj(Q(l, l));
      for (int m = 1; m <= l - k; ++m) {
        const cplx qk = std::conj(Q(k, k));
        const cplx qa = std::conj(Q(k + m - 1, k + m - 1));
        const cplx qb = std::conj(Q(k + m, k + m));
        const cplx denom = qk - qb;
        if (std::abs(denom) < 1e-14)
          throw std::domain_error("rs_bplus: non-regular torus element");
        acc *= (std::exp(-0.5 * ctx.x) * qk - std::exp(0.5 * ctx.x) * qa) / denom;
      }
      b(k, l) = acc;
    }
  return b;
}

namespace detail {

inline double rs_log_factor(double dq, double x) {
  const double s = std::sin(dq);
  if (s == 0.0) throw std::domain_error("rs: singular configuration");
  const double sh = std::sinh(0.5 * x);
  return 1.0 + sh * sh / (s * s);
}

}  // namespace detail

/// theta_k = 2 p_k - (1/2) sum_{m<k} ln[1 + sinh^2(x/2)/sin^2(q_k-q_m)]
///                 + (1/2) sum_{m>k} ln[...]; traceless because the sums
/// telescope.
inline rvec rs_theta_from_p(const rvec& q, const rvec& p, const RsContext& ctx) {
  rs_require(ctx);
  const int n = ctx.n;
  rvec th(n);
  for (int k = 0; k < n; ++k) {
    double v = 2.0 * p[k];
    for (int m = 0; m < n; ++m) {
      if (m == k) continue;
      const double lg = std::log(detail::rs_log_factor(q[k] - q[m], ctx.x));
      v += (m < k ? -0.5 : 0.5) * lg;
    }
    th[k] = v;
  }
  return th;
}

/// Exact affine inverse of the canonical transformation above.
inline rvec rs_p_from_theta(const rvec& q, const rvec& th, const RsContext& ctx) {
  rs_require(ctx);
  const int n = ctx.n;
  rvec p(n);
  for (int k = 0; k < n; ++k) {
    double v = th[k];
    for (int m = 0; m < n; ++m) {
      if (m == k) continue;
      const double lg = std::log(detail::rs_log_factor(q[k] - q[m], ctx.x));
      v -= (m < k ? -0.5 : 0.5) * lg;
    }
    p[k] = 0.5 * v;
  }
  return p;
}

/// H_± = sum_k e^{± theta_k} prod_{m != k} [1 + sinh^2(x/2)/sin^2(q_k-q_m)]^{1/2}.
inline double rs_hamiltonian(const rvec& q, const rvec& th, const RsContext& ctx, int sign) {
  rs_require(ctx);
  const int n = ctx.n;
  double h = 0.0;
  for (int k = 0; k < n; ++k) {
    double prod = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != k) prod *= detail::rs_log_factor(q[k] - q[m], ctx.x);
    h += std::exp(sign * th[k]) * std::sqrt(prod);
  }
  return h;
}

struct RsCrosscheck {
  double res_plus = 0.0;        // |tr(b b^†) - H_+| / max(1, H_+)
  double res_minus = 0.0;       // |tr((b b^†)^{-1}) - H_-| / max(1, H_-)
  double res_constraint = 0.0;  // residual of b_+^{-1} Q^{-1} b_+ Q = nu(x)^{-1}
};

/// Rebuilds the reduced variables from (q, theta): p from the canonical
/// transformation, Q = exp(2 i q), b = e^p b_+(Q), and compares the traces
/// of b b^† and its inverse with the closed Hamiltonians.
inline RsCrosscheck rs_crosscheck(const rvec& q, const rvec& th, const RsContext& ctx) {
  rs_require(ctx);
  const rvec p = rs_p_from_theta(q, th, ctx);
  const cmat Q = torus_from_angles(q, 2.0);
  const cmat bplus = rs_bplus(Q, ctx);
  const cmat b = exp_algebra(diag_from_real(p), SubspaceTag::DiagReal) * bplus;
  const cmat nb = nu(b);
  const double hp = rs_hamiltonian(q, th, ctx, +1);
  const double hm = rs_hamiltonian(q, th, ctx, -1);
  RsCrosscheck out;
  out.res_plus = std::abs(nb.trace().real() - hp) / std::max(1.0, std::abs(hp));
  out.res_minus = std::abs(nb.inverse().trace().real() - hm) / std::max(1.0, std::abs(hm));
  const cmat lhs = bplus.inverse() * Q.adjoint() * bplus * Q;
  out.res_constraint = (lhs - rs_nu_matrix(ctx).inverse()).norm();
  return out;
}

}  // namespace hdlab
