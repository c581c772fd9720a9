#include <doctest.h>

#include "hdlab/algebra.hpp"
#include "hdlab/rng.hpp"

using namespace hdlab;

namespace {
cmat elem(int n, int j, int k) { return root_vector(n, {j, k}); }
}  // namespace

TEST_SUITE_BEGIN("algebra");

TEST_CASE("manin projection splits into skew-Hermitian and Borel parts") {
  const int n = 3;
  SUBCASE("zero maps to zero") {
    auto m = project_manin(cmat::Zero(n, n));
    CHECK(m.g.norm() == 0.0);
    CHECK(m.b.norm() == 0.0);
  }
  SUBCASE("skew-Hermitian input is fixed") {
    Rng rng(7, 0);
    cmat y = random_su(rng, n);
    auto m = project_manin(y);
    CHECK((m.g - y).norm() < 1e-14);
    CHECK(m.b.norm() < 1e-14);
  }
  SUBCASE("random input reassembles with the defining shapes") {
    for (int s = 0; s < 50; ++s) {
      Rng rng(11, s);
      cmat x = random_traceless(rng, n);
      auto m = project_manin(x);
      CHECK((m.g + m.b - x).norm() < 1e-13 * mat_scale(x));
      CHECK(is_skew_hermitian(m.g, 1e-13));
      // upper triangular with real diagonal
      for (int i = 0; i < n; ++i) {
        CHECK(std::abs(m.b(i, i).imag()) < 1e-13);
        for (int j = 0; j < i; ++j) CHECK(std::abs(m.b(i, j)) < 1e-13);
      }
    }
  }
  SUBCASE("projections are complementary idempotents") {
    Rng rng(13, 1);
    cmat x = random_traceless(rng, 4);
    auto m = project_manin(x);
    CHECK((manin_g(m.g) - m.g).norm() < 1e-13);
    CHECK(manin_b(m.g).norm() < 1e-13);
    CHECK((manin_b(m.b) - m.b).norm() < 1e-13);
    CHECK(manin_g(m.b).norm() < 1e-13);
  }
  CHECK_THROWS_AS(project_manin(cmat::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("triangular projection") {
  const int n = 4;
  cmat d = cmat::Zero(n, n);
  d(0, 0) = cplx(1, 2);
  d(1, 1) = -cplx(1, 2);
  auto t = project_triangular(d);
  CHECK(t.lower.norm() == 0.0);
  CHECK(t.upper.norm() == 0.0);
  CHECK((t.diag - d).norm() == 0.0);

  auto t2 = project_triangular(elem(n, 0, 1));
  CHECK(t2.upper(0, 1) == cplx(1, 0));
  CHECK(t2.diag.norm() == 0.0);

  Rng rng(3, 9);
  cmat x = random_traceless(rng, n);
  auto t3 = project_triangular(x);
  CHECK((t3.lower + t3.diag + t3.upper - x).norm() == 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i < j) CHECK(t3.lower(i, j) == 0.0);
      if (i > j) CHECK(t3.upper(i, j) == 0.0);
      if (i != j) CHECK(t3.diag(i, j) == 0.0);
    }
}

TEST_CASE("pairing values and symmetry") {
  // Im tr(diag(1,-1,0) * i*diag(1,-1,0)) = Im(2i) = 2
  const int n = 3;
  cmat x = cmat::Zero(n, n), y = cmat::Zero(n, n);
  x(0, 0) = 1;
  x(1, 1) = -1;
  y = cplx(0, 1) * x;
  CHECK(pairing(x, y) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(pairing(x, cmat::Zero(n, n)) == 0.0);
  CHECK_THROWS_AS(pairing(cmat::Zero(2, 2), cmat::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("Manin triple isotropy and ad-invariance") {
  for (int n = 2; n <= 4; ++n) {
    for (int s = 0; s < 100; ++s) {
      Rng rng(101 + n, s);
      cmat a = random_su(rng, n), b = random_su(rng, n);
      CHECK(std::abs(pairing(a, b)) < 1e-12 * mat_scale(a) * mat_scale(b));
      cmat u = random_borel_algebra(rng, n), v = random_borel_algebra(rng, n);
      CHECK(std::abs(pairing(u, v)) < 1e-12 * mat_scale(u) * mat_scale(v));
      cmat z = random_traceless(rng, n), x = random_traceless(rng, n), y = random_traceless(rng, n);
      const double inv = pairing(commutator(z, x), y) + pairing(x, commutator(z, y));
      CHECK(std::abs(inv) < 1e-10);
    }
  }
}

TEST_CASE("pairing is nondegenerate between the summands") {
  // symmetric as well
  Rng rng(5, 21);
  cmat x = random_traceless(rng, 3), y = random_traceless(rng, 3);
  CHECK(pairing(x, y) == doctest::Approx(pairing(y, x)).epsilon(1e-12));
}

TEST_CASE("root normalization") {
  for (int n = 2; n <= 5; ++n) {
    auto roots = positive_roots(n);
    CHECK(static_cast<int>(roots.size()) == n * (n - 1) / 2);
    for (const auto& r : roots) {
      cmat e = root_vector(n, r);
      cmat em = e.transpose();  // E_{-alpha}
      CHECK((e * em).trace().real() == doctest::Approx(2.0 / kRootLengthSq));
    }
  }
}

TEST_CASE("dual bases reproduce the identity Gram matrix") {
  const int n = 3;
  const auto& t = LieBasis::get(n);

  auto check_dual = [](const std::vector<cmat>& basis, const std::vector<cmat>& dual) {
    for (size_t a = 0; a < basis.size(); ++a)
      for (size_t c = 0; c < basis.size(); ++c) {
        const double want = (a == c) ? 1.0 : 0.0;
        CHECK(std::abs(pairing(basis[a], dual[c]) - want) < 1e-12);
      }
  };
  check_dual(t.g, t.g_dual);
  check_dual(t.b, t.b_dual);
  check_dual(t.g0, t.g0_dual);
  check_dual(t.b0, t.b0_dual);
  check_dual(t.bplus, t.bplus_dual);
  check_dual(t.gperp, t.gperp_dual);
  check_dual(t.full, t.full_dual);

  SUBCASE("su(2) Cartan direction: dual of {iH} is {H/2}") {
    cmat h = cmat::Zero(2, 2);
    h(0, 0) = 1;
    h(1, 1) = -1;
    auto dual = dual_basis({cplx(0, 1) * h}, {h});
    CHECK((dual[0] - 0.5 * h).norm() < 1e-14);
    CHECK(pairing(cplx(0, 1) * h, dual[0]) == doctest::Approx(1.0));
  }
  SUBCASE("degenerate pairing throws") {
    cmat e = elem(2, 0, 1);
    CHECK_THROWS_AS(dual_basis({e}, {e}), std::domain_error);  // <E12,E12> = 0
  }
}

TEST_CASE("structured exponentials") {
  CHECK((exp_algebra(cmat::Zero(2, 2), SubspaceTag::StrictUpper) - cmat::Identity(2, 2)).norm() ==
        0.0);

  cmat ce = cplx(0.3, -0.7) * elem(2, 0, 1);
  CHECK((exp_algebra(ce, SubspaceTag::StrictUpper) - (cmat::Identity(2, 2) + ce)).norm() == 0.0);

  for (int s = 0; s < 20; ++s) {
    Rng rng(19, s);
    cmat z = random_traceless(rng, 3);
    cmat h = 0.5 * (z + z.adjoint());
    cmat eh = exp_algebra(h, SubspaceTag::Hermitian);
    CHECK(is_pos_hermitian(eh, 1e-12));
    CHECK(std::abs(eh.determinant() - 1.0) < 1e-12 * mat_scale(eh));
  }

  SUBCASE("tag/shape mismatch rejected") {
    CHECK_THROWS_AS(exp_algebra(elem(2, 0, 1), SubspaceTag::Hermitian), std::invalid_argument);
    CHECK_THROWS_AS(exp_algebra(cmat::Identity(2, 2), SubspaceTag::StrictUpper),
                    std::invalid_argument);
  }

  SUBCASE("skew exponential is special unitary") {
    Rng rng(23, 5);
    cmat y = random_su(rng, 4);
    cmat u = exp_skew(y);
    CHECK(is_unitary(u, 1e-12));
    CHECK(is_special(u, 1e-11));
  }

  SUBCASE("unipotent log inverts nilpotent exp") {
    Rng rng(29, 3);
    cmat x = random_strict_upper(rng, 5);
    CHECK((log_unipotent(exp_nilpotent(x)) - x).norm() < 1e-12 * mat_scale(x));
  }

  SUBCASE("general exponential agrees with structured paths") {
    Rng rng(31, 2);
    cmat y = random_su(rng, 3);
    CHECK((exp_general(y) - exp_skew(y)).norm() < 1e-12);
    CHECK((exp_any(y) - exp_skew(y)).norm() < 1e-13);
  }
}

TEST_SUITE_END();
