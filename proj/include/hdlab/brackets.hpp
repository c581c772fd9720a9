#pragma once

// Poisson bracket evaluators for every phase-space model, Hamiltonian flow
// curves, and the Poisson-map / moment-map property verifiers.

#include "hdlab/factor.hpp"
#include "hdlab/observable.hpp"

#include <string>
#include <vector>

namespace hdlab {

/// rho = (projection onto su(n) - projection onto Borel) / 2.
inline cmat rho_project(const cmat& x) {
  const auto m = project_manin(x);
  return 0.5 * (m.g - m.b);
}

namespace detail {

/// Evaluates an analytically antisymmetric bilinear form as its skew part,
/// so that swapping arguments flips the sign bitwise and the diagonal is
/// exactly zero.
template <class Bundle, class Form>
double skew_eval(const Bundle& f, const Bundle& h, Form&& form) {
  return 0.5 * (form(f, h) - form(h, f));
}

}  // namespace detail

/// The pair of Poisson structures on SL(n,C); sign=+1 picks the
/// nondegenerate one, sign=-1 the multiplicative one.
inline double bracket_double(int sign, const ObsM& F, const ObsM& H, const cmat& K) {
  const GradM f = grad_double(F, K), h = grad_double(H, K);
  return detail::skew_eval(f, h, [&](const GradM& a, const GradM& c) {
    return pairing(a.left, rho_project(c.left)) + sign * pairing(a.right, rho_project(c.right));
  });
}

/// Multiplicative bracket inherited on SU(n).
inline double bracket_unitary(const ObsG& F, const ObsG& H, const cmat& g) {
  const GradG f = grad_unitary(F, g), h = grad_unitary(H, g);
  return detail::skew_eval(
      f, h, [&](const GradG& a, const GradG& c) { return -pairing(a.right, g.adjoint() * c.left * g); });
}

/// Multiplicative bracket inherited on the Borel group.
inline double bracket_borel(const ObsB& F, const ObsB& H, const cmat& b) {
  const GradB f = grad_borel(F, b), h = grad_borel(H, b);
  const cmat binv = b.inverse();
  return detail::skew_eval(
      f, h, [&](const GradB& a, const GradB& c) { return pairing(a.right, binv * c.left * b); });
}

/// Bracket on the positive Hermitian cone, transported from the Borel group.
inline double bracket_posherm(const ObsP& F, const ObsP& H, const cmat& L) {
  const GradP f = grad_posherm(F, L), h = grad_posherm(H, L);
  return detail::skew_eval(f, h, [&](const GradP& a, const GradP& c) {
    return pairing(manin_b(a.full), manin_g(c.full));
  });
}

/// Bracket on unitary x Borel.
inline double bracket_gb(const ObsGB& F, const ObsGB& H, const PairGB& x) {
  const GradGB f = grad_gb(F, x), h = grad_gb(H, x);
  const cmat binv = x.b.inverse();
  return detail::skew_eval(f, h, [&](const GradGB& a, const GradGB& c) {
    return pairing(a.d2_right, binv * c.d2_left * x.b) -
           pairing(a.d1_right, x.g.adjoint() * c.d1_left * x.g) + pairing(a.d1_left, c.d2_left) -
           pairing(c.d1_left, a.d2_left);
  });
}

/// Bracket on the master phase space unitary x positive Hermitian.
inline double bracket_master(const ObsGL& F, const ObsGL& H, const PairGL& x) {
  const GradGL f = grad_master(F, x), h = grad_master(H, x);
  return detail::skew_eval(f, h, [&](const GradGL& a, const GradGL& c) {
    return pairing(a.d2, manin_g(c.d2)) - pairing(x.g * a.d1_right * x.g.adjoint(), c.d1_left) +
           pairing(a.d1_left, c.d2) - pairing(c.d1_left, a.d2);
  });
}

/// Product bracket on Borel x Borel.
inline double bracket_pair_bb(const ObsBB& F, const ObsBB& H, const PairBB& x) {
  const GradBB f = grad_pair_bb(F, x), h = grad_pair_bb(H, x);
  const cmat b1inv = x.b1.inverse(), b2inv = x.b2.inverse();
  return detail::skew_eval(f, h, [&](const GradBB& a, const GradBB& c) {
    return pairing(a.first.right, b1inv * c.first.left * x.b1) +
           pairing(a.second.right, b2inv * c.second.left * x.b2);
  });
}

/// Product bracket with the sign-flipped structure on the first slot.
inline double bracket_pair_pp_minus(const ObsPP& F, const ObsPP& H, const PairPP& x) {
  const GradPP f = grad_pair_pp(F, x), h = grad_pair_pp(H, x);
  return detail::skew_eval(f, h, [&](const GradPP& a, const GradPP& c) {
    return -pairing(manin_b(a.first.full), manin_g(c.first.full)) +
           pairing(manin_b(a.second.full), manin_g(c.second.full));
  });
}

// ---------------------------------------------------------------------------
// Hamiltonian flow curves.

struct DoubleFlowGen {
  cmat left, right;  // K(t) = exp(t*left) K exp(t*right)
};

inline DoubleFlowGen ham_generators_double(int sign, const ObsM& H, const cmat& K) {
  const GradM h = grad_double(H, K);
  return {rho_project(h.left), static_cast<double>(sign) * rho_project(h.right)};
}

inline cmat ham_curve_double(const DoubleFlowGen& gen, const cmat& K, double t) {
  return exp_any(cmat(t * gen.left)) * K * exp_any(cmat(t * gen.right));
}

/// Flow curve of f on the Borel group: b(t) = b exp(t (b^{-1} Df b)_Borel).
inline cmat ham_curve_borel(const ObsB& f, const cmat& b, double t) {
  const GradB g = grad_borel(f, b);
  const cmat w = manin_b(b.inverse() * g.left * b);
  return b * exp_any(cmat(t * w));
}

/// Evolution on the positive Hermitian cone: dL/dt = [(DH)_g, L].
inline cmat flow_field_posherm(const ObsP& H, const cmat& L) {
  const GradP h = grad_posherm(H, L);
  return commutator(manin_g(h.full), L);
}

/// For H = phi(L) pulled back through (g,L) -> L the flow only moves g:
/// dg/dt = (Dphi(L)) g, dL/dt = 0.
inline std::pair<cmat, cmat> flow_field_master_pullback(const ObsP& phi, const PairGL& x) {
  const GradP h = grad_posherm(phi, x.L);
  return {cmat(h.full * x.g), cmat::Zero(x.L.rows(), x.L.cols())};
}

// ---------------------------------------------------------------------------
// Verifier reports.

struct CheckResult {
  std::string name;
  double residual = 0.0;  // max over samples
  double tol = 0.0;
  bool pass = false;
  int samples = 0;
  std::string note;  // offending sample / context for failures
};

/// max |{F o m, H o m}_src(x) - {F,H}_tgt(m(x))| over points and probe pairs.
template <class SrcP, class SrcObs, class TgtP, class TgtObs>
CheckResult verify_poisson_map(
    const std::string& name, const std::function<TgtP(const SrcP&)>& map,
    const std::function<double(const SrcObs&, const SrcObs&, const SrcP&)>& src_bracket,
    const std::function<double(const TgtObs&, const TgtObs&, const TgtP&)>& tgt_bracket,
    const std::function<SrcObs(const TgtObs&)>& pullback, const std::vector<TgtObs>& probes,
    const std::vector<SrcP>& points, double tol) {
  CheckResult r{name, 0.0, tol, false, static_cast<int>(points.size()), ""};
  int worst_point = -1;
  for (size_t ip = 0; ip < points.size(); ++ip) {
    const SrcP& x = points[ip];
    const TgtP y = map(x);
    for (size_t a = 0; a < probes.size(); ++a)
      for (size_t c = a + 1; c < probes.size(); ++c) {
        const SrcObs fa = pullback(probes[a]), fc = pullback(probes[c]);
        const double lhs = src_bracket(fa, fc, x);
        const double rhs = tgt_bracket(probes[a], probes[c], y);
        const double res = std::abs(lhs - rhs);
        if (res > r.residual) {
          r.residual = res;
          worst_point = static_cast<int>(ip);
        }
      }
  }
  r.pass = r.residual < tol;
  if (!r.pass) r.note = "worst sample index " + std::to_string(worst_point);
  return r;
}

// ---------------------------------------------------------------------------
// Moment-map verification. Works on any model whose points are single
// matrices (the double itself and the Borel group).

template <class Obs>
struct MomentSetting {
  std::function<cmat(const cmat&)> moment;                          // point -> Borel group
  std::function<cmat(const cmat&, const cmat&)> action;             // (eta, point) -> point
  std::function<cmat(const Obs&, const cmat&, double)> ham_curve;   // flow curve of a probe
  std::function<double(const Obs&, const Obs&, const cmat&)> bracket;
};

struct MomentCheckResult {
  CheckResult generator;  // vector field from the moment map vs the action
  CheckResult poisson_action;  // infinitesimal Poisson-action identity
};

namespace detail {

/// Derivative of f along the infinitesimal action of X at x.
template <class Obs>
double action_derivative(const MomentSetting<Obs>& s, const Obs& f, const cmat& X, const cmat& x,
                         const FdSpec& fd) {
  return fd_derivative([&](double t) { return f.eval(s.action(exp_skew(cmat(t * X)), x)); }, fd);
}

}  // namespace detail

/// Checks that the vector field induced by the moment map matches the
/// derivative of the action map, and that the infinitesimal Poisson-action
/// identity holds on probe pairs.
template <class Obs>
MomentCheckResult verify_moment_property(const std::string& name, const MomentSetting<Obs>& s,
                                         const std::vector<Obs>& probes,
                                         const std::vector<cmat>& points, double tol,
                                         const FdSpec& fd = {}) {
  MomentCheckResult out;
  out.generator = {name + ".generator", 0.0, tol, false, static_cast<int>(points.size()), ""};
  out.poisson_action = {name + ".poisson-action", 0.0, tol, false,
                        static_cast<int>(points.size()), ""};

  for (const cmat& x : points) {
    const int n = static_cast<int>(x.rows());
    const auto& basis = LieBasis::get(n);
    const cmat mom_inv = s.moment(x).inverse();

    // ham_curve-based matrix bracket {moment, f} at x.
    auto moment_bracket = [&](const Obs& f) {
      return fd_derivative_matrix([&](double t) { return s.moment(s.ham_curve(f, x, t)); }, fd);
    };

    for (const Obs& f : probes) {
      const cmat mb = moment_bracket(f) * mom_inv;
      for (const cmat& X : basis.g) {
        const double lhs = detail::action_derivative(s, f, X, x, fd);
        const double rhs = -pairing(X, mb);
        out.generator.residual = std::max(out.generator.residual, std::abs(lhs - rhs));
      }
    }

    // Infinitesimal Poisson-action identity on the first probe pair:
    // L_X {F,H} - {L_X F, H} - {F, L_X H} = ([zeta_F, zeta_H]_*, X),
    // where zeta_F collects the action derivatives against the dual basis
    // and [ , ]_* is the opposite of the matrix commutator on the Borel
    // algebra (the dual group carries the opposite product).
    if (probes.size() >= 2) {
      const Obs& F = probes[0];
      const Obs& H = probes[1];
      // nested differentiation: a larger inner step keeps the rounding
      // noise of the inner derivative out of the outer one
      const FdSpec fd_inner{10.0 * fd.h, true};
      auto lie_along = [&](const Obs& f, const cmat& X) {
        Obs out_obs = f;
        out_obs.analytic = nullptr;
        out_obs.eval = [&s, f, X, fd_inner](const cmat& y) {
          return fd_derivative([&](double t) { return f.eval(s.action(exp_skew(cmat(t * X)), y)); },
                               fd_inner);
        };
        return out_obs;
      };
      auto zeta = [&](const Obs& f, const cmat& y) {
        cmat z = cmat::Zero(n, n);
        for (size_t a = 0; a < basis.g.size(); ++a)
          z += detail::action_derivative(s, f, basis.g[a], y, fd) * basis.g_dual[a];
        return z;
      };
      const cmat zF = zeta(F, x), zH = zeta(H, x);
      for (size_t a = 0; a < basis.g.size(); a += 3) {
        const cmat& X = basis.g[a];
        const double t1 = fd_derivative(
            [&](double t) {
              const cmat y = s.action(exp_skew(cmat(t * X)), x);
              return s.bracket(F, H, y);
            },
            fd);
        const double t2 = s.bracket(lie_along(F, X), H, x);
        const double t3 = s.bracket(F, lie_along(H, X), x);
        const double t4 = -pairing(commutator(zF, zH), X);
        out.poisson_action.residual =
            std::max(out.poisson_action.residual, std::abs(t1 - t2 - t3 - t4));
      }
    }
  }
  out.generator.pass = out.generator.residual < tol;
  out.poisson_action.pass = out.poisson_action.residual < tol;
  return out;
}

}  // namespace hdlab
