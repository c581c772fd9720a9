#pragma once

// The full property battery behind `lab verify` and the acceptance suite:
// every numbered check runs at its pinned tolerance and sample count and
// reports one pass/fail result. Failing sweep checks carry the offending
// sample in the note field.

#include "hdlab/brackets.hpp"
#include "hdlab/io.hpp"
#include "hdlab/master.hpp"
#include "hdlab/models.hpp"
#include "hdlab/probes.hpp"
#include "hdlab/reduction.hpp"
#include "hdlab/rng.hpp"

#include <chrono>

namespace hdlab {

struct RunConfig {
  int n = 2;
  std::uint64_t seed = 42;
  double tol_scale = 1.0;
  int samples = 0;  // 0 keeps each check's pinned count
  double t_max = 10.0;
  int steps = 200;
  std::vector<double> eps_list;  // empty -> halving sweep from 0.1
  double coupling = 0.7;
  std::string output_dir;
  std::string format = "csv";
};

struct RunReport {
  std::string command;
  json config_echo;
  std::vector<CheckResult> checks;
  double elapsed_seconds = 0.0;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace battery {

namespace detail {

inline void finish(CheckResult& r) { r.pass = r.residual <= r.tol; }

inline void track(CheckResult& r, double residual, const std::function<json()>& sample) {
  if (residual > r.residual) {
    r.residual = residual;
    if (residual > r.tol && sample) r.note = sample().dump();
  }
}

inline cmat unit_traceless(Rng& rng, int n) {
  cmat a = random_traceless(rng, n);
  return a / a.norm();
}

inline std::vector<double> default_eps() {
  std::vector<double> e;
  for (int i = 0; i < 8; ++i) e.push_back(0.1 / std::pow(2.0, i));
  return e;
}

}  // namespace detail

// --- 1. Manin triple: isotropy of both summands, invariance of the pairing.
inline std::vector<CheckResult> manin_triple(const RunConfig& cfg) {
  const int per_n = cfg.samples > 0 ? cfg.samples : 1000;
  CheckResult iso{"manin.isotropy", 0.0, 1e-10 * cfg.tol_scale, false, 0, ""};
  CheckResult inv{"manin.ad-invariance", 0.0, 1e-10 * cfg.tol_scale, false, 0, ""};
  for (int n = 2; n <= 5; ++n) {
    for (int s = 0; s < per_n; ++s) {
      Rng rng(cfg.seed + n, s);
      const cmat a = random_su(rng, n), b = random_su(rng, n);
      const cmat u = random_borel_algebra(rng, n), v = random_borel_algebra(rng, n);
      detail::track(iso, std::abs(pairing(a, b)), nullptr);
      detail::track(iso, std::abs(pairing(u, v)), nullptr);
      const cmat x = random_traceless(rng, n), y = random_traceless(rng, n),
                 z = random_traceless(rng, n);
      const double r = std::abs(pairing(commutator(z, x), y) + pairing(x, commutator(z, y)));
      detail::track(inv, r, [&] { return json{{"z", mat_to_json(z)}, {"x", mat_to_json(x)}}; });
      iso.samples += 2;
      inv.samples += 1;
    }
  }
  detail::finish(iso);
  detail::finish(inv);
  return {iso, inv};
}

// --- 2. Factorization roundtrips: Iwasawa both ways, the cross relation,
// nu and the Borel split, dressing equivariance of nu.
inline std::vector<CheckResult> factorization_roundtrips(const RunConfig& cfg) {
  const int per_n = cfg.samples > 0 ? cfg.samples : 1000;
  const double tol = 1e-10 * cfg.tol_scale;
  CheckResult iwa{"factor.iwasawa-roundtrip", 0.0, tol, false, 0, ""};
  CheckResult lr{"factor.left-right-relation", 0.0, tol, false, 0, ""};
  CheckResult nuc{"factor.nu-roundtrip", 0.0, tol, false, 0, ""};
  CheckResult spl{"factor.borel-split", 0.0, tol, false, 0, ""};
  CheckResult drs{"factor.dressing-equivariance", 0.0, tol, false, 0, ""};
  for (int n = 2; n <= 5; ++n) {
    for (int s = 0; s < per_n; ++s) {
      Rng rng(cfg.seed + 11 * n, s);
      const cmat K = random_sl(rng, n);
      auto sample = [&] { return json{{"K", mat_to_json(K)}}; };
      const auto f = iwasawa(K);
      const double sc = mat_scale(K);
      detail::track(iwa, (f.g_left * f.b_right.inverse() - K).norm() / sc, sample);
      detail::track(iwa, (f.b_left * f.g_right.inverse() - K).norm() / sc, sample);
      detail::track(lr,
                    (f.g_right.adjoint() * f.b_right - f.b_left.inverse() * f.g_left).norm() / sc,
                    sample);
      const cmat b = random_borel(rng, n);
      detail::track(nuc, (nu_inverse(nu(b)) - b).norm() / mat_scale(b),
                    [&] { return json{{"b", mat_to_json(b)}}; });
      const auto sp = split_borel(b);
      detail::track(spl,
                    (exp_algebra(sp.p, SubspaceTag::DiagReal) * sp.b_plus - b).norm() / mat_scale(b),
                    [&] { return json{{"b", mat_to_json(b)}}; });
      const cmat eta = random_unitary(rng, n);
      const cmat d = dress(eta, b);
      detail::track(drs, (nu(d) - eta * nu(b) * eta.adjoint()).norm() / mat_scale(nu(b)),
                    [&] { return json{{"b", mat_to_json(b)}, {"eta", mat_to_json(eta)}}; });
      for (auto* c : {&iwa, &lr, &nuc, &spl, &drs}) c->samples += 1;
    }
  }
  for (auto* c : {&iwa, &lr, &nuc, &spl, &drs}) detail::finish(*c);
  return {iwa, lr, nuc, spl, drs};
}

// --- 3. Bracket axioms: antisymmetry bitwise, Jacobi and Leibniz under
// finite differences on trace observables.
inline std::vector<CheckResult> bracket_axioms(const RunConfig& cfg) {
  const int triples = cfg.samples > 0 ? cfg.samples : 100;
  const double tol = 5e-5 * cfg.tol_scale;
  CheckResult anti{"bracket.antisymmetry", 0.0, 0.0, false, 0, ""};
  CheckResult jac{"bracket.jacobi", 0.0, tol, false, 0, ""};
  CheckResult lei{"bracket.leibniz", 0.0, tol, false, 0, ""};
  for (int n = 2; n <= 3; ++n) {
    for (int s = 0; s < triples / 2; ++s) {
      Rng rng(cfg.seed + 23 * n, s);
      const cmat K = random_sl(rng, n, 0.6);
      const cmat A1 = detail::unit_traceless(rng, n), A2 = detail::unit_traceless(rng, n),
                 A3 = detail::unit_traceless(rng, n);
      ObsM f1 = trace_monomial_double(A1, 1 + s % 2, s % 2 == 0);
      ObsM f2 = trace_monomial_double(A2, 2, s % 3 == 0);
      ObsM f3 = trace_monomial_double(A3, 1, s % 3 != 0);
      auto sample = [&] { return json{{"K", mat_to_json(K)}, {"A1", mat_to_json(A1)}}; };

      const int sign = (s % 4 < 3) ? +1 : -1;
      detail::track(anti, std::abs(bracket_double(sign, f1, f1, K)), sample);
      detail::track(anti, std::abs(bracket_double(sign, f1, f2, K) + bracket_double(sign, f2, f1, K)),
                    sample);
      auto inner = [&](const ObsM& a, const ObsM& b) {
        return ObsM{[=](const cmat& X) { return bracket_double(sign, a, b, X); }, nullptr, {}};
      };
      const double j = bracket_double(sign, f1, inner(f2, f3), K) +
                       bracket_double(sign, f2, inner(f3, f1), K) +
                       bracket_double(sign, f3, inner(f1, f2), K);
      detail::track(jac, std::abs(j), sample);
      ObsM prod{[f1, f2](const cmat& X) { return f1.eval(X) * f2.eval(X); }, nullptr, {}};
      const double l = bracket_double(+1, prod, f3, K) - f1.eval(K) * bracket_double(+1, f2, f3, K) -
                       f2.eval(K) * bracket_double(+1, f1, f3, K);
      detail::track(lei, std::abs(l), sample);
      anti.samples += 2;
      jac.samples += 1;
      lei.samples += 1;
    }
  }
  for (auto* c : {&anti, &jac, &lei}) detail::finish(*c);
  return {anti, jac, lei};
}

// --- 4. Poisson-map battery.
inline std::vector<CheckResult> poisson_maps(const RunConfig& cfg) {
  const double tol = 5e-5 * cfg.tol_scale;
  const int pts = cfg.samples > 0 ? cfg.samples : 6;
  std::vector<CheckResult> out;

  for (int n = 2; n <= 3; ++n) {
    Rng prng(cfg.seed + 31 * n, 0);
    std::vector<cmat> A;
    for (int i = 0; i < 4; ++i) A.push_back(detail::unit_traceless(prng, n));

    {  // (Lambda_L, Lambda_R) onto Borel x Borel
      std::vector<ObsBB> probes = {word_obs_bb({A[0], {{0, 1}}, true}),
                                   word_obs_bb({A[1], {{1, 1}}, false}),
                                   word_obs_bb({A[2], {{0, 1}, {1, 1}}, true})};
      std::vector<cmat> points;
      for (int s = 0; s < pts; ++s) {
        Rng rng(cfg.seed + 37 * n, s);
        points.push_back(random_sl(rng, n, 0.6));
      }
      auto rep = verify_poisson_map<cmat, ObsM, PairBB, ObsBB>(
          "poisson-map.borel-pair.n" + std::to_string(n),
          [](const cmat& K) {
            const auto f = iwasawa(K);
            return PairBB{f.b_left, f.b_right};
          },
          [](const ObsM& F, const ObsM& H, const cmat& K) { return bracket_double(+1, F, H, K); },
          [](const ObsBB& F, const ObsBB& H, const PairBB& x) { return bracket_pair_bb(F, H, x); },
          [](const ObsBB& o) {
            return ObsM{[o](const cmat& K) {
                          const auto f = iwasawa(K);
                          return o.eval({f.b_left, f.b_right});
                        },
                        nullptr,
                        {}};
          },
          probes, points, tol);
      out.push_back(rep);
    }
    {  // constants-of-motion map onto the sign-flipped product
      std::vector<ObsPP> probes = {word_obs_pp({A[0], {{0, 1}}, true}),
                                   word_obs_pp({A[1], {{1, 1}}, false}),
                                   word_obs_pp({A[2], {{0, 1}, {1, 1}}, true})};
      std::vector<PairGL> points;
      for (int s = 0; s < pts; ++s) {
        Rng rng(cfg.seed + 41 * n, s);
        points.push_back({random_unitary(rng, n), random_pos_hermitian(rng, n, 0.7)});
      }
      auto rep = verify_poisson_map<PairGL, ObsGL, PairPP, ObsPP>(
          "poisson-map.constants.n" + std::to_string(n),
          [](const PairGL& x) { return psi(x); },
          [](const ObsGL& F, const ObsGL& H, const PairGL& x) { return bracket_master(F, H, x); },
          [](const ObsPP& F, const ObsPP& H, const PairPP& x) {
            return bracket_pair_pp_minus(F, H, x);
          },
          [](const ObsPP& o) {
            return ObsGL{[o](const PairGL& x) { return o.eval(psi(x)); }, nullptr, {}};
          },
          probes, points, tol);
      out.push_back(rep);
    }
    {  // nu onto the positive Hermitian cone
      std::vector<ObsP> probes = {word_obs_posherm({A[0], {{0, 1}}, true}),
                                  word_obs_posherm({A[1], {{0, 1}}, false}),
                                  word_obs_posherm({A[2], {{0, 2}}, true})};
      std::vector<cmat> points;
      for (int s = 0; s < pts; ++s) {
        Rng rng(cfg.seed + 43 * n, s);
        points.push_back(random_borel(rng, n, 0.6));
      }
      auto rep = verify_poisson_map<cmat, ObsB, cmat, ObsP>(
          "poisson-map.nu.n" + std::to_string(n), [](const cmat& b) { return nu(b); },
          [](const ObsB& F, const ObsB& H, const cmat& b) { return bracket_borel(F, H, b); },
          [](const ObsP& F, const ObsP& H, const cmat& L) { return bracket_posherm(F, H, L); },
          [](const ObsP& o) {
            return ObsB{[o](const cmat& b) { return o.eval(nu(b)); }, nullptr, {}};
          },
          probes, points, tol);
      out.push_back(rep);
    }
    {  // model transport (g, b) -> (g, nu(b))
      std::vector<ObsGL> probes = {word_obs_master({A[0], {{0, 1}, {1, 1}}, true}),
                                   word_obs_master({A[1], {{1, 1}}, false}),
                                   word_obs_master({A[2], {{0, 1}, {1, 2}}, true})};
      std::vector<PairGB> points;
      for (int s = 0; s < pts; ++s) {
        Rng rng(cfg.seed + 47 * n, s);
        points.push_back({random_unitary(rng, n), random_borel(rng, n, 0.6)});
      }
      auto rep = verify_poisson_map<PairGB, ObsGB, PairGL, ObsGL>(
          "poisson-map.model-transport.n" + std::to_string(n),
          [](const PairGB& x) { return PairGL{x.g, nu(x.b)}; },
          [](const ObsGB& F, const ObsGB& H, const PairGB& x) { return bracket_gb(F, H, x); },
          [](const ObsGL& F, const ObsGL& H, const PairGL& x) { return bracket_master(F, H, x); },
          [](const ObsGL& o) {
            return ObsGB{[o](const PairGB& x) { return o.eval({x.g, nu(x.b)}); }, nullptr, {}};
          },
          probes, points, tol);
      out.push_back(rep);
    }
  }
  return out;
}

// --- 5. Moment-map battery plus moment equivariance.
inline std::vector<CheckResult> moment_maps(const RunConfig& cfg) {
  const double tol = 5e-5 * cfg.tol_scale;
  const int pts = cfg.samples > 0 ? cfg.samples : 2;
  std::vector<CheckResult> out;

  for (int n = 2; n <= 3; ++n) {
    Rng prng(cfg.seed + 53 * n, 0);
    {  // dressing action on the Borel group, identity moment map
      MomentSetting<ObsB> st;
      st.moment = [](const cmat& b) { return b; };
      st.action = [](const cmat& eta, const cmat& b) { return dress(eta, b); };
      st.ham_curve = [](const ObsB& f, const cmat& b, double t) { return ham_curve_borel(f, b, t); };
      st.bracket = [](const ObsB& F, const ObsB& H, const cmat& b) {
        return bracket_borel(F, H, b);
      };
      std::vector<ObsB> probes = {
          word_obs_borel({detail::unit_traceless(prng, n), {{0, 1}}, true}),
          word_obs_borel({detail::unit_traceless(prng, n), {{0, 2}}, false}),
          word_obs_borel({detail::unit_traceless(prng, n), {{0, 1}}, false})};
      std::vector<cmat> points;
      for (int s = 0; s < pts; ++s) {
        Rng rng(cfg.seed + 59 * n, s);
        points.push_back(random_borel(rng, n, 0.6));
      }
      auto rep =
          verify_moment_property("moment.dressing.n" + std::to_string(n), st, probes, points, tol);
      out.push_back(rep.generator);
      out.push_back(rep.poisson_action);
    }
    {  // quasi-adjoint action on the double, product moment map
      MomentSetting<ObsM> st;
      st.moment = [](const cmat& K) { return moment_map(K); };
      st.action = [](const cmat& eta, const cmat& K) { return quasi_adjoint(eta, K); };
      st.ham_curve = [](const ObsM& f, const cmat& K, double t) {
        return ham_curve_double(ham_generators_double(+1, f, K), K, t);
      };
      st.bracket = [](const ObsM& F, const ObsM& H, const cmat& K) {
        return bracket_double(+1, F, H, K);
      };
      std::vector<ObsM> probes = {trace_monomial_double(detail::unit_traceless(prng, n), 1, true),
                                  trace_monomial_double(detail::unit_traceless(prng, n), 2, false),
                                  trace_monomial_double(detail::unit_traceless(prng, n), 1, false)};
      std::vector<cmat> points;
      for (int s = 0; s < pts; ++s) {
        Rng rng(cfg.seed + 61 * n, s);
        points.push_back(random_sl(rng, n, 0.6));
      }
      auto rep = verify_moment_property("moment.quasi-adjoint.n" + std::to_string(n), st, probes,
                                        points, tol);
      out.push_back(rep.generator);
      out.push_back(rep.poisson_action);
    }
  }

  CheckResult equi{"moment.equivariance", 0.0, 1e-9 * cfg.tol_scale, false, 0, ""};
  for (int n = 2; n <= 3; ++n) {
    const int count = cfg.samples > 0 ? cfg.samples * 10 : 50;
    for (int s = 0; s < count; ++s) {
      Rng rng(cfg.seed + 67 * n, s);
      const cmat K = random_sl(rng, n);
      const cmat eta = random_unitary(rng, n);
      const double r =
          (moment_map(quasi_adjoint(eta, K)) - dress(eta, moment_map(K))).norm() / mat_scale(K);
      detail::track(equi, r,
                    [&] { return json{{"K", mat_to_json(K)}, {"eta", mat_to_json(eta)}}; });
      equi.samples += 1;
    }
  }
  detail::finish(equi);
  out.push_back(equi);
  return out;
}

// --- 6. Conservation along the exact flow and commutation of the
// pulled-back invariants.
inline std::vector<CheckResult> master_conservation(const RunConfig& cfg) {
  CheckResult cons{"master.conservation", 0.0, 1e-9 * cfg.tol_scale, false, 0, ""};
  CheckResult comm{"master.commutation", 0.0, 5e-5 * cfg.tol_scale, false, 0, ""};
  const int pts = cfg.samples > 0 ? cfg.samples : 5;
  for (int n = 2; n <= 3; ++n) {
    for (int s = 0; s < pts; ++s) {
      Rng rng(cfg.seed + 71 * n, s);
      const PairGL x0{random_unitary(rng, n), random_pos_hermitian(rng, n)};
      const auto p0 = psi(x0);
      for (int k = 1; k <= n - 1; ++k) {
        const SpectralFn phi = power_invariant(k);
        for (int i = 1; i <= 20; ++i) {
          const double t = cfg.t_max * i / 20.0;
          const auto xt = free_flow(phi, x0, t);
          const auto pt = psi(xt);
          const double r = (pt.L1 - p0.L1).norm() + (pt.L2 - p0.L2).norm();
          detail::track(cons, r, [&] { return json{{"t", t}, {"g0", mat_to_json(x0.g)}}; });
          cons.samples += 1;
        }
      }
      for (int j = 1; j <= n - 1; ++j)
        for (int k = j + 1; k <= n; ++k) {
          ObsGL F = pullback_invariant(power_invariant(j));
          ObsGL H = pullback_invariant(power_invariant(k));
          F.analytic = nullptr;  // exercise the finite-difference route
          H.analytic = nullptr;
          detail::track(comm, std::abs(bracket_master(F, H, x0)),
                        [&] { return json{{"j", j}, {"k", k}}; });
          comm.samples += 1;
        }
    }
  }
  detail::finish(cons);
  detail::finish(comm);
  return {cons, comm};
}

// --- 7. Rank evidence.
inline std::vector<CheckResult> rank_sweep(const RunConfig& cfg) {
  const int per_n = cfg.samples > 0 ? cfg.samples : 100;
  std::vector<CheckResult> out;
  for (int n = 2; n <= 4; ++n) {
    CheckResult c{"rank.n" + std::to_string(n), 0.0, 0.0, false, 0, ""};
    int bad = 0;
    for (int s = 0; s < per_n; ++s) {
      Rng rng(cfg.seed + 73 * n, s);
      const PairGL x{random_unitary(rng, n), random_pos_hermitian(rng, n)};
      const auto rep = rank_evidence(x);
      if (!rep.conclusive || !rep.pass) {
        ++bad;
        if (c.note.empty())
          c.note = json{{"g", mat_to_json(x.g)},
                        {"L", mat_to_json(x.L)},
                        {"rank_flows", rep.rank_flows},
                        {"rank_constants", rep.rank_constants}}
                       .dump();
      }
      c.samples += 1;
    }
    c.residual = static_cast<double>(bad);
    c.pass = bad == 0;
    out.push_back(c);
  }
  return out;
}

// --- 8. Reduced-bracket consistency: slice formula vs ambient bracket on
// invariant words, and slice formula vs the (Q, b) form.
inline std::vector<CheckResult> reduced_consistency(const RunConfig& cfg) {
  const double tol = 5e-5 * cfg.tol_scale;
  const int per_n = cfg.samples > 0 ? cfg.samples : 100;
  CheckResult amb{"reduced.slice-vs-ambient", 0.0, tol, false, 0, ""};
  CheckResult two{"reduced.slice-vs-borel-form", 0.0, tol, false, 0, ""};
  for (int n = 2; n <= 3; ++n) {
    const std::vector<Word> words = {invariant_word({{0, 1}, {1, 1}}, true, n),
                                     invariant_word({{0, 2}, {1, 1}}, false, n),
                                     invariant_word({{0, 1}, {1, 2}}, true, n)};
    for (int s = 0; s < per_n; ++s) {
      Rng rng(cfg.seed + 79 * n, s);
      const cmat Q = random_regular_torus(rng, n, 0.35);
      const cmat b = random_borel(rng, n, 0.6);
      const SlicePoint x{Q, nu(b)};
      const size_t a = s % words.size(), c = (s + 1) % words.size();
      const double red = reduced_bracket_slice(word_obs_slice(words[a]), word_obs_slice(words[c]), x);
      const double full =
          bracket_master(word_obs_master(words[a]), word_obs_master(words[c]), {x.Q, x.L});
      detail::track(amb, std::abs(red - full), [&] { return json{{"Q", mat_to_json(Q)}}; });
      const double gb =
          reduced_bracket_gb(word_obs_slice_gb(words[a]), word_obs_slice_gb(words[c]), {Q, b});
      detail::track(two, std::abs(red - gb), [&] { return json{{"Q", mat_to_json(Q)}}; });
      amb.samples += 1;
      two.samples += 1;
    }
  }
  detail::finish(amb);
  detail::finish(two);
  return {amb, two};
}

// --- 9. Quadrature fidelity at n = 3.
inline std::vector<CheckResult> quadrature_fidelity(const RunConfig& cfg) {
  CheckResult vf{"quadrature.vector-field", 0.0, 1e-5 * cfg.tol_scale, false, 0, ""};
  CheckResult inv{"quadrature.invariants", 0.0, 1e-8 * cfg.tol_scale, false, 0, ""};
  const int trajectories = cfg.samples > 0 ? cfg.samples : 20;
  const int n = 3;
  const double dt = 2.5e-4;
  std::vector<double> grid;
  for (int i = 0; i <= 4000; ++i) grid.push_back(dt * i);
  QuadratureOptions opt;
  opt.gauge_correction = true;
  for (int s = 0; s < trajectories; ++s) {
    Rng rng(cfg.seed + 83, s);
    const SlicePoint x{random_regular_torus(rng, n, 0.5), random_pos_hermitian(rng, n, 0.3)};
    const SpectralFn phi = power_invariant(1 + s % 2, s % 2 ? 0.4 : 1.0);
    const auto traj = quadrature_integrate(phi, x, grid, opt);
    if (traj.breakpoint) continue;  // regularity loss is reported, not an error
    for (size_t i = 200; i + 1 < grid.size(); i += 600) {
      const auto [v1, v2] = reduced_vf(phi, traj.pts[i]);
      const cmat dq = (traj.pts[i + 1].Q - traj.pts[i - 1].Q) / (2 * dt);
      const cmat dl = (traj.pts[i + 1].L - traj.pts[i - 1].L) / (2 * dt);
      detail::track(vf, (dq - v1).norm() / mat_scale(v1),
                    [&] { return json{{"t", grid[i]}, {"Q0", mat_to_json(x.Q)}}; });
      detail::track(vf, (dl - v2).norm() / mat_scale(v2),
                    [&] { return json{{"t", grid[i]}, {"Q0", mat_to_json(x.Q)}}; });
      vf.samples += 2;
    }
    for (int k = 1; k <= n; ++k) {
      const double c0 = SpectralFn::power_trace(x.L, k).real();
      for (size_t i = 0; i < traj.pts.size(); i += 500) {
        detail::track(inv, std::abs(SpectralFn::power_trace(traj.pts[i].L, k).real() - c0),
                      [&] { return json{{"k", k}, {"t", grid[i]}}; });
        inv.samples += 1;
      }
    }
  }
  detail::finish(vf);
  detail::finish(inv);
  return {vf, inv};
}

// --- 10. Exactness of the decoupling map.
inline std::vector<CheckResult> zeta_exactness(const RunConfig& cfg) {
  const int per_n = cfg.samples > 0 ? cfg.samples : 250;
  CheckResult eq{"zeta.defining-equation", 0.0, 1e-12 * cfg.tol_scale, false, 0, ""};
  CheckResult rt{"zeta.roundtrip", 0.0, 1e-12 * cfg.tol_scale, false, 0, ""};
  CheckResult lead{"zeta.leading-order", 0.0, 1e-6 * cfg.tol_scale, false, 0, ""};
  for (int n = 2; n <= 5; ++n) {
    for (int s = 0; s < per_n; ++s) {
      Rng rng(cfg.seed + 89 * n, s);
      const cmat Q = random_regular_torus(rng, n, 0.3);
      const cmat b = random_borel(rng, n);
      const auto d = zeta_forward({Q, b});
      const cmat bp = zeta_solve_bplus(Q, d.lam);
      auto sample = [&] { return json{{"Q", mat_to_json(Q)}, {"b", mat_to_json(b)}}; };
      detail::track(eq, (bp * d.lam - Q.adjoint() * bp * Q).norm() / mat_scale(bp), sample);
      detail::track(rt, (zeta_inverse(d).b - b).norm() / mat_scale(b), sample);
      eq.samples += 1;
      rt.samples += 1;

      cmat sigma = random_strict_upper(rng, n);
      sigma *= 1e-4 / sigma.norm();
      const cmat beta = log_unipotent(zeta_solve_bplus(Q, exp_nilpotent(sigma)));
      for (const auto& root : positive_roots(n)) {
        const cplx denom = std::conj(Q(root.j, root.j)) * Q(root.k, root.k) - 1.0;
        detail::track(lead, std::abs(beta(root.j, root.k) - sigma(root.j, root.k) / denom), sample);
      }
      lead.samples += 1;
    }
  }
  for (auto* c : {&eq, &rt, &lead}) detail::finish(*c);
  return {eq, rt, lead};
}

// --- 11. Scaling limits.
inline std::vector<CheckResult> scaling_limits(const RunConfig& cfg) {
  const auto eps = cfg.eps_list.empty() ? detail::default_eps() : cfg.eps_list;
  const int pts = cfg.samples > 0 ? cfg.samples : 4;
  CheckResult ratio{"scaling.energy-ratios", 0.0, 0.0, false, 0, ""};
  CheckResult elim{"scaling.energy-limit", 0.0, 1e-4 * cfg.tol_scale, false, 0, ""};
  CheckResult blim{"scaling.bracket-limit", 0.0, 1e-4 * cfg.tol_scale, false, 0, ""};
  CheckResult bratio{"scaling.bracket-ratios-second-order", 0.0, 0.0, false, 0, ""};
  int ratio_bad = 0, bratio_bad = 0;

  for (int n = 2; n <= 3; ++n) {
    for (int s = 0; s < pts; ++s) {
      Rng rng(cfg.seed + 97 * n, s);
      SutherlandPoint pt;
      pt.q = random_positions(rng, n, 0.6, 1.3);
      cmat p0 = random_b0(rng, n, 0.15);
      pt.p = rvec(n);
      for (int i = 0; i < n; ++i) pt.p[i] = p0(i, i).real();
      pt.X = random_strict_upper(rng, n, 0.15);

      const auto rows = scaling_energy_table(pt, eps);
      if (!scaling_converges(rows, 1.6, 2.4)) {
        ++ratio_bad;
        if (ratio.note.empty()) {
          json tab = json::array();
          for (const auto& r : rows) tab.push_back({{"eps", r.eps}, {"err", r.err}, {"ratio", r.ratio}});
          ratio.note = tab.dump();
        }
      }
      ratio.samples += 1;
      const auto fine = scaling_energy_table(pt, {1e-3});
      detail::track(elim, fine[0].err, [&] { return json{{"n", n}, {"s", s}}; });
      elim.samples += 1;

      // bracket limit: position/momentum pair (exact) plus a spin pair
      const LinearSpinPoint lpt{torus_from_angles(pt.q), diag_from_real(pt.p), pt.X};
      ObsLin spin_a{[](const LinearSpinPoint& y) { return std::norm(y.X(0, 1)); }, nullptr, {}};
      ObsLin spin_b{
          [](const LinearSpinPoint& y) { return (y.X * y.X.adjoint() * y.X).trace().imag(); },
          nullptr,
          {}};
      ObsLin mom{[](const LinearSpinPoint& y) {
                   double v = 0;
                   for (int i = 0; i < y.p.rows(); ++i) v += (i + 1) * y.p(i, i).real();
                   return v;
                 },
                 nullptr,
                 {}};
      ObsLin pos{[](const LinearSpinPoint& y) {
                   double v = 0;
                   for (int i = 0; i < y.Q.rows(); ++i) v += (2 * i - 1) * std::arg(y.Q(i, i));
                   return v;
                 },
                 nullptr,
                 {}};
      const auto canon = scaling_bracket_table(pos, mom, lpt, {1e-3});
      detail::track(blim, canon[0].err, nullptr);
      ObsLin spin_c = (n == 2) ? mom : spin_b;  // two sites: mixed pair (pure spin pairs are exact)
      const auto sp = scaling_bracket_table(spin_a, spin_c, lpt, eps);
      detail::track(blim, scaling_bracket_table(spin_a, spin_c, lpt, {1e-3})[0].err, nullptr);
      blim.samples += 2;
      if (!scaling_converges(sp, 3.4, 4.6)) {
        ++bratio_bad;
        if (bratio.note.empty()) {
          json tab = json::array();
          for (const auto& r : sp) tab.push_back({{"eps", r.eps}, {"err", r.err}, {"ratio", r.ratio}});
          bratio.note = tab.dump();
        }
      }
      bratio.samples += 1;
    }
  }
  ratio.residual = ratio_bad;
  ratio.pass = ratio_bad == 0;
  bratio.residual = bratio_bad;
  bratio.pass = bratio_bad == 0;
  detail::finish(elim);
  detail::finish(blim);
  return {ratio, elim, blim, bratio};
}

// --- 12. Closed trigonometric identities.
inline std::vector<CheckResult> rs_identities(const RunConfig& cfg) {
  const int total = cfg.samples > 0 ? cfg.samples : 1000;
  CheckResult invx{"rs.nu-inversion", 0.0, 1e-12 * cfg.tol_scale, false, 0, ""};
  CheckResult constr{"rs.orbit-constraint", 0.0, 1e-10 * cfg.tol_scale, false, 0, ""};
  CheckResult cross{"rs.crosscheck", 0.0, 1e-10 * cfg.tol_scale, false, 0, ""};
  const std::vector<double> couplings = {0.3, -0.3, 1.0, -1.0};
  for (int n = 2; n <= 5; ++n) {
    for (double x : couplings) {
      const RsContext ctx{n, x};
      const RsContext ctxm{n, -x};
      detail::track(invx,
                    (rs_nu_matrix(ctxm) * rs_nu_matrix(ctx) - cmat::Identity(n, n)).norm(),
                    [&] { return json{{"n", n}, {"x", x}}; });
      invx.samples += 1;
      const int per = (total + 15) / 16;
      for (int s = 0; s < per; ++s) {
        Rng rng(cfg.seed + 101 * n + static_cast<std::uint64_t>(1000 * (x + 2)), s);
        const rvec q = random_positions(rng, n, 0.25, 1.3);
        rvec th(n);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
          th[i] = rng.uniform(-1.0, 1.0);
          sum += th[i];
        }
        for (int i = 0; i < n; ++i) th[i] -= sum / n;
        const auto res = rs_crosscheck(q, th, ctx);
        auto sample = [&] {
          json jq = json::array(), jt = json::array();
          for (int i = 0; i < n; ++i) {
            jq.push_back(q[i]);
            jt.push_back(th[i]);
          }
          return json{{"n", n}, {"x", x}, {"q", jq}, {"theta", jt}};
        };
        detail::track(constr, res.res_constraint, sample);
        detail::track(cross, std::max(res.res_plus, res.res_minus), sample);
        constr.samples += 1;
        cross.samples += 1;
      }
    }
  }
  for (auto* c : {&invx, &constr, &cross}) detail::finish(*c);
  return {invx, constr, cross};
}

inline RunReport full_battery(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.command = "verify";
  auto add = [&](std::vector<CheckResult> cs) {
    for (auto& c : cs) rep.checks.push_back(std::move(c));
  };
  add(manin_triple(cfg));
  add(factorization_roundtrips(cfg));
  add(bracket_axioms(cfg));
  add(poisson_maps(cfg));
  add(moment_maps(cfg));
  add(master_conservation(cfg));
  add(rank_sweep(cfg));
  add(reduced_consistency(cfg));
  add(quadrature_fidelity(cfg));
  add(zeta_exactness(cfg));
  add(scaling_limits(cfg));
  add(rs_identities(cfg));
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace battery
}  // namespace hdlab
