#include <doctest.h>

#include "hdlab/reduction.hpp"
#include "hdlab/rng.hpp"

using namespace hdlab;

namespace {

SlicePoint random_slice(Rng& rng, int n, double min_gap = 0.35) {
  return {random_regular_torus(rng, n, min_gap), random_pos_hermitian(rng, n)};
}

cmat offdiag(const cmat& x) { return x - cartan_part(x); }

}  // namespace

TEST_SUITE_BEGIN("reduction");

TEST_CASE("dynamical r-matrix") {
  SUBCASE("annihilates diagonal input") {
    Rng rng(301, 0);
    const cmat Q = random_regular_torus(rng, 3);
    const auto r = make_dynamical_r(Q);
    CHECK(r_apply(r, random_b0(rng, 3)).norm() == 0.0);
  }
  SUBCASE("two-site antipodal phases kill the root direction") {
    cmat Q = cmat::Zero(2, 2);
    Q(0, 0) = cplx(0, 1);
    Q(1, 1) = cplx(0, -1);
    const auto r = make_dynamical_r(Q);
    cmat e = cmat::Zero(2, 2);
    e(0, 1) = 1.0;
    CHECK(r_apply(r, e).norm() < 1e-15);
  }
  SUBCASE("defining relation against the adjoint operator") {
    for (int s = 0; s < 25; ++s) {
      Rng rng(307, s);
      const int n = 2 + s % 3;
      const cmat Q = random_regular_torus(rng, n);
      const auto r = make_dynamical_r(Q);
      const cmat X = random_traceless(rng, n);
      const cmat RX = r_apply(r, X);
      const cmat lhs = Q * RX * Q.adjoint() - RX;
      const cmat rhs = 0.5 * (Q * offdiag(X) * Q.adjoint() + offdiag(X));
      CHECK((lhs - rhs).norm() < 1e-12 * mat_scale(X));
    }
  }
  SUBCASE("antisymmetry and subspace preservation") {
    for (int s = 0; s < 25; ++s) {
      Rng rng(311, s);
      const cmat Q = random_regular_torus(rng, 3);
      const auto r = make_dynamical_r(Q);
      const cmat X = random_traceless(rng, 3), Y = random_traceless(rng, 3);
      CHECK(std::abs(pairing(r_apply(r, X), Y) + pairing(X, r_apply(r, Y))) < 1e-12);
      CHECK(manin_g(r_apply(r, random_borel_algebra(rng, 3))).norm() < 1e-13);
      CHECK(manin_b(r_apply(r, random_su(rng, 3))).norm() < 1e-13);
      // mixed-projection identity
      const double lhs = pairing(r_apply(r, X), Y);
      const double rhs = pairing(r_apply(r, manin_g(X)), manin_b(Y)) -
                         pairing(manin_b(X), r_apply(r, manin_g(Y)));
      CHECK(std::abs(lhs - rhs) < 1e-12 * mat_scale(X) * mat_scale(Y));
    }
  }
  SUBCASE("non-regular torus element rejected") {
    CHECK_THROWS_AS(make_dynamical_r(cmat::Identity(2, 2)), std::domain_error);
  }
}

TEST_CASE("reduced bracket matches the ambient bracket on invariant words") {
  for (int n = 2; n <= 3; ++n) {
    std::vector<Word> words = {invariant_word({{0, 1}, {1, 1}}, true, n),
                               invariant_word({{0, 1}, {1, 1}}, false, n),
                               invariant_word({{0, 2}, {1, 1}}, false, n),
                               invariant_word({{0, 1}, {1, 2}}, true, n)};
    for (int s = 0; s < 5; ++s) {
      Rng rng(313 + n, s);
      const SlicePoint x = random_slice(rng, n);
      for (size_t a = 0; a < words.size(); ++a)
        for (size_t c = a + 1; c < words.size(); ++c) {
          const double red =
              reduced_bracket_slice(word_obs_slice(words[a]), word_obs_slice(words[c]), x);
          const double amb =
              bracket_master(word_obs_master(words[a]), word_obs_master(words[c]), {x.Q, x.L});
          CHECK(std::abs(red - amb) < 5e-5);
        }
    }
  }
}

TEST_CASE("both forms of the reduced bracket agree through nu") {
  for (int n = 2; n <= 3; ++n) {
    std::vector<Word> words = {invariant_word({{0, 1}, {1, 1}}, true, n),
                               invariant_word({{0, 2}, {1, 1}}, false, n),
                               invariant_word({{0, 1}, {1, 2}}, true, n)};
    for (int s = 0; s < 5; ++s) {
      Rng rng(331 + n, s);
      const cmat Q = random_regular_torus(rng, n, 0.35);
      const cmat b = random_borel(rng, n);
      const SliceGB y{Q, b};
      const SlicePoint x{Q, nu(b)};
      for (size_t a = 0; a < words.size(); ++a)
        for (size_t c = a + 1; c < words.size(); ++c) {
          const double v1 =
              reduced_bracket_slice(word_obs_slice(words[a]), word_obs_slice(words[c]), x);
          const double v2 =
              reduced_bracket_gb(word_obs_slice_gb(words[a]), word_obs_slice_gb(words[c]), y);
          CHECK(std::abs(v1 - v2) < 5e-5);
        }
    }
  }
}

TEST_CASE("reduced vector field") {
  SUBCASE("diagonal cone variable moves only the torus") {
    Rng rng(337, 0);
    const cmat Q = random_regular_torus(rng, 3);
    cmat L = cmat::Zero(3, 3);
    L(0, 0) = 2.0;
    L(1, 1) = 0.8;
    L(2, 2) = 1.0 / 1.6;
    const auto [v1, v2] = reduced_vf(power_invariant(1), {Q, L});
    CHECK(v2.norm() < 1e-14);
    CHECK(v1.norm() > 1e-4);
  }
  SUBCASE("bracket against probes is the field derivative") {
    for (int s = 0; s < 6; ++s) {
      Rng rng(347, s);
      const int n = 2 + s % 2;
      const SlicePoint x = random_slice(rng, n);
      const SpectralFn phi = power_invariant(1 + s % 2);
      const auto [v1, v2] = reduced_vf(phi, x);
      ObsSlice phi_bar{[phi](const SlicePoint& y) { return phi.eval(y.L); }, nullptr, {}};
      const Word w = invariant_word({{0, 1}, {1, 1}}, s % 2 == 0, n);
      ObsSlice F = word_obs_slice(w);
      const double lhs = reduced_bracket_slice(F, phi_bar, x);
      const cmat v0 = v1 * x.Q.adjoint();           // torus generator
      const cmat w2 = r_apply(make_dynamical_r(x.Q), phi.grad(x.L));  // cone generator
      const double rhs = fd_derivative([&](double t) {
        const cmat Qt = exp_any(cmat(t * v0)) * x.Q;
        const cmat e = exp_any(cmat(t * w2));
        return F.eval({Qt, cmat(e * x.L * e.adjoint())});
      });
      CHECK(std::abs(lhs - rhs) < 5e-5 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST_CASE("quadrature along the reduced flow") {
  SUBCASE("time zero returns the initial point") {
    Rng rng(349, 0);
    const SlicePoint x = random_slice(rng, 3);
    const auto traj = quadrature_integrate(power_invariant(1), x, {0.0});
    REQUIRE(traj.pts.size() == 1);
    CHECK((traj.pts[0].Q - x.Q).norm() < 1e-12);
    CHECK((traj.pts[0].L - x.L).norm() < 1e-12);
  }
  SUBCASE("diagonal cone variable gives pure torus rotation") {
    // phases chosen so no pair collides inside the time window
    cmat Q = cmat::Zero(3, 3);
    Q(0, 0) = std::exp(cplx(0, -2.0));
    Q(1, 1) = std::exp(cplx(0, 0.1));
    Q(2, 2) = std::exp(cplx(0, 1.9));
    cmat L = cmat::Zero(3, 3);
    L(0, 0) = 2.0;
    L(1, 1) = 0.8;
    L(2, 2) = 1.0 / 1.6;
    const SpectralFn phi = power_invariant(1);
    std::vector<double> grid;
    for (int i = 0; i <= 25; ++i) grid.push_back(0.02 * i);
    const auto traj = quadrature_integrate(phi, {Q, L}, grid);
    REQUIRE(traj.pts.size() == grid.size());
    const cmat v0 = cartan_part(phi.grad(L));
    for (size_t i = 0; i < grid.size(); i += 5) {
      const cmat want = exp_any(cmat(grid[i] * v0)) * Q;
      CHECK((traj.pts[i].Q - want).norm() < 1e-9);
      CHECK((traj.pts[i].L - L).norm() < 1e-9);
    }
  }
  SUBCASE("trajectory follows the reduced field and conserves invariants") {
    Rng rng(359, 2);
    const SlicePoint x{random_regular_torus(rng, 3, 0.5), random_pos_hermitian(rng, 3, 0.35)};
    const SpectralFn phi = power_invariant(2, 0.5);
    std::vector<double> grid;
    const double dt = 2.5e-4;
    for (int i = 0; i <= 1600; ++i) grid.push_back(dt * i);
    QuadratureOptions opt;
    opt.gauge_correction = true;
    const auto traj = quadrature_integrate(phi, x, grid, opt);
    REQUIRE(traj.pts.size() == grid.size());
    for (size_t i = 100; i + 1 < grid.size(); i += 450) {
      const auto [v1, v2] = reduced_vf(phi, traj.pts[i]);
      const cmat dq = (traj.pts[i + 1].Q - traj.pts[i - 1].Q) / (2 * dt);
      const cmat dl = (traj.pts[i + 1].L - traj.pts[i - 1].L) / (2 * dt);
      CHECK((dq - v1).norm() < 1e-5 * mat_scale(v1));
      CHECK((dl - v2).norm() < 1e-5 * mat_scale(v2));
    }
    for (int k = 1; k <= 3; ++k) {
      const double c0 = SpectralFn::power_trace(x.L, k).real();
      for (size_t i = 0; i < grid.size(); i += 400) {
        CHECK(std::abs(SpectralFn::power_trace(traj.pts[i].L, k).real() - c0) < 1e-9);
      }
    }
    // the slice trajectory represents the projected free flow: invariant
    // words agree with the unreduced curve (exp(t Dphi(L0)) Q0, L0)
    const cmat gen = phi.grad(x.L);
    for (size_t i = 0; i < grid.size(); i += 320) {
      const cmat m = exp_skew(cmat(grid[i] * gen)) * x.Q;
      for (const Word& w : {invariant_word({{0, 1}, {1, 1}}, true, 3),
                            invariant_word({{0, 2}, {1, 1}}, false, 3),
                            invariant_word({{0, 1}, {1, 2}}, true, 3)}) {
        const double upstairs = eval_word(w, {m, x.L});
        const double slice = eval_word(w, {traj.pts[i].Q, traj.pts[i].L});
        CHECK(std::abs(upstairs - slice) < 1e-8 * (1.0 + std::abs(upstairs)));
      }
    }
  }
}

TEST_CASE("quadrature edge behaviour") {
  SUBCASE("phase collision truncates with a recorded breakpoint") {
    // diagonal cone variable: phases move at fixed rates and collide
    cmat Q = cmat::Zero(2, 2);
    Q(0, 0) = std::exp(cplx(0, -0.3));
    Q(1, 1) = std::exp(cplx(0, 0.3));
    cmat L = cmat::Zero(2, 2);
    L(0, 0) = 2.0;
    L(1, 1) = 0.5;
    // rates 2i(L - tr/n)_0 = i(+1.5, -1.5): the gap 0.6 closes near t = 0.2
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(0.004 * i);
    const auto traj = quadrature_integrate(power_invariant(1), {Q, L}, grid);
    REQUIRE(traj.breakpoint.has_value());
    CHECK(*traj.breakpoint > 30);
    CHECK(traj.pts.size() == *traj.breakpoint);
    CHECK(traj.t.size() == traj.pts.size());
  }
  SUBCASE("coarse grids are bridged by step adaptation") {
    Rng rng(361, 0);
    const SlicePoint x{random_regular_torus(rng, 3, 0.5), random_pos_hermitian(rng, 3, 0.4)};
    const SpectralFn phi = power_invariant(2);
    // single coarse jumps against a dense reference; the eigenvalue
    // branches must come out identical (phases of the frame are gauge)
    const auto a = quadrature_integrate(phi, x, {0.0, 1.0, 2.0});
    const auto b = quadrature_integrate(phi, x, [] {
      std::vector<double> g;
      for (int i = 0; i <= 2000; ++i) g.push_back(0.001 * i);
      return g;
    }());
    REQUIRE(a.pts.size() == 3);
    REQUIRE_FALSE(b.breakpoint.has_value());
    CHECK((a.pts[2].Q - b.pts[2000].Q).norm() < 1e-8);
    Eigen::SelfAdjointEigenSolver<cmat> ea(a.pts[2].L, Eigen::EigenvaluesOnly),
        eb(b.pts[2000].L, Eigen::EigenvaluesOnly);
    CHECK((ea.eigenvalues() - eb.eigenvalues()).norm() < 1e-10);
  }
}

TEST_CASE("decoupling map") {
  SUBCASE("diagonal Borel input carries no spin") {
    Rng rng(367, 0);
    const cmat Q = random_regular_torus(rng, 3);
    cmat b = cmat::Zero(3, 3);
    b(0, 0) = std::exp(0.2);
    b(1, 1) = std::exp(-0.7);
    b(2, 2) = std::exp(0.5);
    const auto d = zeta_forward({Q, b});
    CHECK((d.lam - cmat::Identity(3, 3)).norm() < 1e-13);
    CHECK((d.p - split_borel(b).p).norm() < 1e-13);
  }
  SUBCASE("two-site closed form") {
    Rng rng(373, 1);
    const cmat Q = random_regular_torus(rng, 2);
    const cplx c(0.4, -0.9);
    cmat b = cmat::Identity(2, 2);
    b(0, 1) = c;
    const auto d = zeta_forward({Q, b});
    const cplx w = std::conj(Q(0, 0)) * Q(1, 1);
    CHECK(std::abs(d.lam(0, 1) - c * (w - 1.0)) < 1e-14);
    // and the band recursion inverts it
    CHECK(std::abs(zeta_solve_bplus(Q, d.lam)(0, 1) - c) < 1e-14);
  }
  SUBCASE("roundtrip and defining equation") {
    for (int n = 2; n <= 5; ++n) {
      for (int s = 0; s < 25; ++s) {
        Rng rng(379 + n, s);
        const cmat Q = random_regular_torus(rng, n, 0.3);
        const cmat b = random_borel(rng, n);
        const auto d = zeta_forward({Q, b});
        const auto back = zeta_inverse(d);
        CHECK((back.b - b).norm() < 1e-12 * mat_scale(b));
        const cmat bp = zeta_solve_bplus(Q, d.lam);
        CHECK((bp * d.lam - Q.adjoint() * bp * Q).norm() < 1e-12 * mat_scale(bp));
      }
    }
  }
  SUBCASE("leading order of the inverse in the spin size") {
    for (int s = 0; s < 10; ++s) {
      Rng rng(383, s);
      const int n = 3 + s % 2;
      const cmat Q = random_regular_torus(rng, n, 0.3);
      cmat sigma = random_strict_upper(rng, n);
      sigma *= 1e-4 / sigma.norm();
      const cmat lam = exp_nilpotent(sigma);
      const cmat beta = log_unipotent(zeta_solve_bplus(Q, lam));
      for (const auto& root : positive_roots(n)) {
        const cplx denom = std::conj(Q(root.j, root.j)) * Q(root.k, root.k) - 1.0;
        CHECK(std::abs(beta(root.j, root.k) - sigma(root.j, root.k) / denom) < 1e-6);
      }
    }
  }
  SUBCASE("torus equivariance") {
    Rng rng(389, 3);
    const int n = 3;
    const cmat Q = random_regular_torus(rng, n, 0.3);
    const cmat b = random_borel(rng, n);
    const cmat eta0 = random_regular_torus(rng, n, 0.1);
    const auto d = zeta_forward({Q, b});
    const auto d2 = zeta_forward({Q, cmat(eta0 * b * eta0.adjoint())});
    CHECK((d2.p - d.p).norm() < 1e-12);
    CHECK((d2.lam - eta0 * d.lam * eta0.adjoint()).norm() < 1e-12 * mat_scale(d.lam));
  }
  SUBCASE("spin variable must be unipotent") {
    Rng rng(397, 4);
    DecoupledPoint bad{random_regular_torus(rng, 2), cmat::Zero(2, 2), 2.0 * cmat::Identity(2, 2)};
    CHECK_THROWS_AS(zeta_inverse(bad), std::invalid_argument);
  }
  SUBCASE("non-regular torus element is rejected") {
    cmat lam = cmat::Identity(2, 2);
    lam(0, 1) = 0.5;
    CHECK_THROWS_AS(zeta_solve_bplus(cmat::Identity(2, 2), lam), std::domain_error);
  }
}

TEST_CASE("decoupled bracket") {
  const int n = 3;
  Rng rng(401, 0);
  const cmat Q = random_regular_torus(rng, n, 0.35);
  const cmat b = random_borel(rng, n);
  const DecoupledPoint x = zeta_forward({Q, b});

  SUBCASE("position functions commute") {
    ObsDec F{[](const DecoupledPoint& y) { return y.Q.trace().real(); }, nullptr, {}};
    ObsDec H{[](const DecoupledPoint& y) { return (y.Q * y.Q).trace().imag(); }, nullptr, {}};
    CHECK(std::abs(decoupled_bracket(F, H, x)) < 1e-10);
  }
  SUBCASE("dressing-invariant spin functions are central") {
    ObsDec C{[](const DecoupledPoint& y) { return nu(y.lam).trace().real(); }, nullptr, {}};
    ObsDec H1{[](const DecoupledPoint& y) { return (y.Q * nu(y.lam)).trace().real(); }, nullptr, {}};
    ObsDec H2{[](const DecoupledPoint& y) {
                return (y.p * y.p).trace().real() + (y.Q * y.lam).trace().imag();
              },
              nullptr,
              {}};
    CHECK(std::abs(decoupled_bracket(C, H1, x)) < 5e-5);
    CHECK(std::abs(decoupled_bracket(C, H2, x)) < 5e-5);
  }
  SUBCASE("canonical pairing of position and momentum probes") {
    rvec a(n), c(n);
    a << 0.7, -0.2, -0.5;
    c << 0.3, 0.4, -0.7;
    ObsDec F{[a](const DecoupledPoint& y) {
               double v = 0;
               for (int i = 0; i < y.Q.rows(); ++i) v += a[i] * std::arg(y.Q(i, i));
               return v;
             },
             nullptr,
             {}};
    ObsDec H{[c](const DecoupledPoint& y) {
               double v = 0;
               for (int i = 0; i < y.p.rows(); ++i) v += c[i] * y.p(i, i).real();
               return v;
             },
             nullptr,
             {}};
    const double want = a.dot(c);
    CHECK(decoupled_bracket(F, H, x) == doctest::Approx(want).epsilon(1e-6));
  }
  SUBCASE("agrees with the reduced bracket through the decoupling map") {
    std::vector<ObsDec> fs;
    std::vector<ObsSliceGB> gs;
    // G0-invariant probes built from traces of Q, p, and nu(lambda)
    auto add = [&](std::function<double(const cmat&, const cmat&, const cmat&)> f) {
      fs.push_back(ObsDec{[f](const DecoupledPoint& y) { return f(y.Q, y.p, y.lam); }, nullptr, {}});
      gs.push_back(ObsSliceGB{[f](const SliceGB& y) {
                                const auto d = zeta_forward(y);
                                return f(d.Q, d.p, d.lam);
                              },
                              nullptr,
                              {}});
    };
    add([](const cmat& Q, const cmat& p, const cmat& lam) {
      return (Q * nu(lam)).trace().real() + (p * p).trace().real();
    });
    add([](const cmat& Q, const cmat& p, const cmat& lam) {
      return (Q * p).trace().imag() + nu(lam).trace().real();
    });
    add([](const cmat& Q, const cmat& p, const cmat& lam) {
      return (Q * Q * nu(lam)).trace().imag();
    });
    for (size_t i = 0; i < fs.size(); ++i)
      for (size_t j = i + 1; j < fs.size(); ++j) {
        const double dec = decoupled_bracket(fs[i], fs[j], x);
        const double red = reduced_bracket_gb(gs[i], gs[j], {Q, b});
        CHECK(std::abs(dec - red) < 5e-5 * (1.0 + std::abs(dec)));
      }
  }
}

TEST_CASE("residual permutation action") {
  SUBCASE("identity and a two-site swap") {
    Rng rng(409, 0);
    const SlicePoint x = random_slice(rng, 2);
    const auto same = weyl_act({0, 1}, x);
    CHECK((same.Q - x.Q).norm() == 0.0);
    const auto sw = weyl_act({1, 0}, x);
    CHECK(std::abs(sw.Q(0, 0) - x.Q(1, 1)) < 1e-15);
    CHECK(std::abs(sw.Q(1, 1) - x.Q(0, 0)) < 1e-15);
  }
  SUBCASE("invariant words are unchanged") {
    Rng rng(419, 1);
    const SlicePoint x = random_slice(rng, 3);
    const std::vector<int> perm{2, 0, 1};
    const auto y = weyl_act(perm, x);
    for (const Word& w : {invariant_word({{0, 1}, {1, 1}}, true, 3),
                          invariant_word({{0, 2}, {1, 2}}, false, 3)}) {
      CHECK(eval_word(w, {x.Q, x.L}) == doctest::Approx(eval_word(w, {y.Q, y.L})).epsilon(1e-12));
    }
  }
  SUBCASE("slice and squared-Borel pictures are intertwined") {
    Rng rng(421, 2);
    const cmat Q = random_regular_torus(rng, 3, 0.3);
    const cmat b = random_borel(rng, 3);
    const std::vector<int> perm{1, 2, 0};
    const auto y = weyl_act(perm, SliceGB{Q, b});
    const auto z = weyl_act(perm, SlicePoint{Q, nu(b)});
    CHECK((nu(y.b) - z.L).norm() < 1e-10 * mat_scale(z.L));
    CHECK((y.Q - z.Q).norm() < 1e-12);
  }
  SUBCASE("alcove normalization sorts phases") {
    Rng rng(431, 3);
    const cmat Q = random_regular_torus(rng, 4, 0.2);
    const auto res = alcove_permutation(Q);
    CHECK_FALSE(res.tie);
    const auto y = weyl_act(res.perm, SlicePoint{Q, random_pos_hermitian(rng, 4)});
    for (int i = 0; i + 1 < 4; ++i) CHECK(std::arg(y.Q(i, i)) <= std::arg(y.Q(i + 1, i + 1)));
  }
  SUBCASE("phase ties are flagged and broken by index") {
    cmat Q = cmat::Identity(3, 3);  // all phases equal
    const auto res = alcove_permutation(Q);
    CHECK(res.tie);
    CHECK(res.perm == std::vector<int>{0, 1, 2});
  }
  SUBCASE("decoupled points transform through the decoupling map") {
    Rng rng(433, 4);
    const cmat Q = random_regular_torus(rng, 3, 0.3);
    const cmat b = random_borel(rng, 3, 0.8);
    const DecoupledPoint d = zeta_forward({Q, b});
    const std::vector<int> perm{1, 2, 0}, inv{2, 0, 1};
    const auto moved = weyl_act(perm, d);
    CHECK(std::abs(moved.Q(0, 0) - Q(1, 1)) < 1e-14);
    CHECK(is_unipotent_upper(moved.lam, 1e-9));
    // applying the inverse permutation undoes the move up to a torus gauge,
    // so every dressing-invariant spin function returns to its value
    const auto back = weyl_act(inv, moved);
    CHECK((back.Q - d.Q).norm() < 1e-12);
    CHECK(nu(back.lam).trace().real() ==
          doctest::Approx(nu(d.lam).trace().real()).epsilon(1e-9));
  }
}

TEST_SUITE_END();
