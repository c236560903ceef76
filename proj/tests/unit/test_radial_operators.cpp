#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "warpdirac/errors.hpp"
#include "warpdirac/radial_operators.hpp"

using namespace warpdirac;

namespace {

Eigen::VectorXd sorted(Eigen::VectorXd v) {
  std::sort(v.data(), v.data() + v.size());
  return v;
}

Eigen::VectorXd dense_eigenvalues(const DiscreteRadialOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double square_residual(const MetricProfile& p, double mu, double m, int N) {
  const RadialGrid g = make_grid(40.0, N);
  return verify_square(assemble_dirac(p, mu, m, g), assemble_kg(p, mu, m, -1, g), assemble_kg(p, mu, m, +1, g));
}

}  // namespace

TEST_CASE("grid construction") {
  const RadialGrid g = make_grid(40.0, 2048);
  CHECK(g.h() == doctest::Approx(40.0 / 2048));
  CHECK(g.r(0) == doctest::Approx(0.5 * g.h()));
  CHECK(g.nodes().size() == 2048);
  CHECK_THROWS_AS(make_grid(40.0, 8), Error);
  CHECK_THROWS_AS(make_grid(-1.0, 64), Error);
}

TEST_CASE("difference matrices") {
  const RadialGrid g = make_grid(10.0, 32);
  const Eigen::MatrixXd D = Eigen::MatrixXd(centered_difference(g));
  CHECK((D + D.transpose()).norm() == 0.0);
  const Eigen::MatrixXd L = Eigen::MatrixXd(second_difference(g));
  CHECK((L - L.transpose()).norm() == 0.0);
  CHECK(L(3, 3) == doctest::Approx(-2.0 / (g.h() * g.h())));
}

TEST_CASE("Dirac and Klein-Gordon matrices are symmetric") {
  const RadialGrid g = make_grid(40.0, 256);
  for (const MetricProfile& p : {MetricProfile::flat(), MetricProfile::asymptotically_flat(0.01, 1, 1),
                                 MetricProfile::sinh(), MetricProfile::polynomial(3)}) {
    for (double mu : {1.0, -2.0}) {
      CHECK(assemble_dirac(p, mu, 1.0, g).hermiticity_defect() <= 1e-12);
      CHECK(assemble_kg(p, mu, 1.0, -1, g).hermiticity_defect() <= 1e-12);
      CHECK(assemble_kg(p, mu, 1.0, +1, g).hermiticity_defect() <= 1e-12);
    }
  }
}

TEST_CASE("Dirac spectrum is symmetric and gapped by the mass") {
  const RadialGrid g = make_grid(40.0, 512);
  const Eigen::VectorXd ev = sorted(dense_eigenvalues(assemble_dirac(MetricProfile::flat(), 1.0, 0.0, g)));
  const Eigen::Index n = ev.size();
  double worst = 0;
  for (Eigen::Index i = 0; i < n; ++i) worst = std::max(worst, std::abs(ev(i) + ev(n - 1 - i)));
  CHECK(worst <= 1e-9 * ev.cwiseAbs().maxCoeff());

  const Eigen::VectorXd massive = dense_eigenvalues(assemble_dirac(MetricProfile::flat(), 1.0, 1.0, g));
  CHECK(massive.cwiseAbs().minCoeff() >= 1.0 - 1e-9);
}

TEST_CASE("Dirac singular values are invariant under mu to -mu") {
  const RadialGrid g = make_grid(40.0, 256);
  for (const MetricProfile& p : {MetricProfile::flat(), MetricProfile::asymptotically_flat(0.01, 1, 1)}) {
    const Eigen::VectorXd a = sorted(dense_eigenvalues(assemble_dirac(p, 1.0, 0.0, g)).cwiseAbs());
    const Eigen::VectorXd b = sorted(dense_eigenvalues(assemble_dirac(p, -1.0, 0.0, g)).cwiseAbs());
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9 * a.maxCoeff());
  }
}

TEST_CASE("Klein-Gordon channel potentials on the flat profile") {
  const RadialGrid g = make_grid(40.0, 256);
  const double h2 = g.h() * g.h();
  const DiscreteRadialOperator minus = assemble_kg(MetricProfile::flat(), 1.0, 0.0, -1, g);
  const DiscreteRadialOperator plus = assemble_kg(MetricProfile::flat(), 1.0, 0.0, +1, g);
  for (int i : {0, 10, 100, 255}) {
    const double r = g.r(i);
    CHECK(minus.matrix.coeff(i, i) - 2.0 / h2 == doctest::Approx(2.0 / (r * r)).epsilon(1e-9));
    CHECK(std::abs(plus.matrix.coeff(i, i) - 2.0 / h2) <= 1e-9 * 2.0 / h2);
  }
}

TEST_CASE("Klein-Gordon operators are nonnegative on admissible profiles") {
  const RadialGrid g = make_grid(40.0, 256);
  for (const MetricProfile& p : {MetricProfile::flat(), MetricProfile::asymptotically_flat(0.01, 1, 1)}) {
    for (double mu : {1.0, -1.0, 3.0}) {
      for (int sign : {-1, +1}) {
        const DiscreteRadialOperator kg = assemble_kg(p, mu, 0.0, sign, g);
        const Eigen::VectorXd ev = dense_eigenvalues(kg);
        CHECK(ev.minCoeff() >= -1e-8 * ev.cwiseAbs().maxCoeff());
      }
    }
  }
}

TEST_CASE("square residual converges at second order") {
  const double r512 = square_residual(MetricProfile::flat(), 1.0, 0.0, 512);
  const double r1024 = square_residual(MetricProfile::flat(), 1.0, 0.0, 1024);
  CHECK(r512 / r1024 >= 3.5);
  double prev = 0;
  for (int N : {256, 512, 1024, 2048}) {
    const double r = square_residual(MetricProfile::flat(), 2.0, 1.0, N);
    if (prev > 0) CHECK(std::log2(prev / r) >= 1.9);
    prev = r;
  }
}

TEST_CASE("square residual is independent of the mass and stable under small warps") {
  const double m0 = square_residual(MetricProfile::flat(), 1.0, 0.0, 512);
  const double m2 = square_residual(MetricProfile::flat(), 1.0, 2.0, 512);
  CHECK(std::abs(m0 - m2) <= 1e-12);
  const double af = square_residual(MetricProfile::asymptotically_flat(0.01, 1, 1), 1.0, 0.0, 512);
  CHECK(af <= 2.0 * m0);
  CHECK(af >= 0.5 * m0);
}

TEST_CASE("mismatched operators are rejected") {
  const RadialGrid g = make_grid(40.0, 128);
  const RadialGrid g2 = make_grid(40.0, 256);
  const auto d = assemble_dirac(MetricProfile::flat(), 1.0, 0.0, g);
  try {
    verify_square(d, assemble_kg(MetricProfile::flat(), 1.0, 0.0, -1, g2), assemble_kg(MetricProfile::flat(), 1.0, 0.0, +1, g2));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Configuration);
  }
  CHECK_THROWS_AS(verify_square(d, assemble_kg(MetricProfile::flat(), 2.0, 0.0, -1, g),
                                assemble_kg(MetricProfile::flat(), 2.0, 0.0, +1, g)),
                  Error);
  CHECK_THROWS_AS(verify_square(d, assemble_kg(MetricProfile::flat(), 1.0, 0.0, +1, g),
                                assemble_kg(MetricProfile::flat(), 1.0, 0.0, -1, g)),
                  Error);
}

TEST_CASE("factorization residuals") {
  const RadialGrid g512 = make_grid(40.0, 512);
  const RadialGrid g1024 = make_grid(40.0, 1024);
  const auto a = factorization_check(MetricProfile::flat(), 1.0, 0.0, g512);
  const auto b = factorization_check(MetricProfile::flat(), 1.0, 0.0, g1024);
  CHECK(a.res_minus / b.res_minus >= 3.5);
  CHECK(a.res_plus / b.res_plus >= 3.5);

  // mu -> -mu swaps the two channels.
  const MetricProfile af = MetricProfile::asymptotically_flat(0.01, 1, 1);
  const auto p = factorization_check(af, 2.0, 0.0, g512);
  const auto q = factorization_check(af, -2.0, 0.0, g512);
  CHECK(p.res_minus == doctest::Approx(q.res_plus).epsilon(1e-12));
  CHECK(p.res_plus == doctest::Approx(q.res_minus).epsilon(1e-12));

  const auto massive = factorization_check(af, 2.0, 3.0, g512);
  CHECK(massive.res_minus == doctest::Approx(p.res_minus).epsilon(1e-12));
  CHECK(massive.res_plus == doctest::Approx(p.res_plus).epsilon(1e-12));
}

TEST_CASE("flat Laplacian in three dimensions has no centrifugal term") {
  const RadialGrid g = make_grid(10.0, 64);
  const Eigen::MatrixXd H0 = assemble_flat_laplacian(3, g).dense();
  const Eigen::MatrixXd L = Eigen::MatrixXd(second_difference(g));
  CHECK((H0 + L).norm() <= 1e-12 * L.norm());
  const Eigen::MatrixXd H5 = assemble_flat_laplacian(5, g).dense();
  CHECK(H5(5, 5) - H0(5, 5) == doctest::Approx(2.0 / (g.r(5) * g.r(5))));
}

TEST_CASE("norm equivalence") {
  const RadialGrid g = make_grid(40.0, 512);
  for (double s : {0.5, 1.0}) {
    const auto flat = norm_equivalence_check(MetricProfile::flat(), s, 10, 1, g);
    CHECK(std::abs(flat.worst_ratio - 1.0) <= 1e-10);
  }
  for (const MetricProfile& p : {MetricProfile::flat(), MetricProfile::asymptotically_flat(0.05, 1, 1)}) {
    const auto zero = norm_equivalence_check(p, 0.0, 10, 2, g);
    CHECK(std::abs(zero.worst_ratio - 1.0) <= 1e-8);
  }
  const auto af = norm_equivalence_check(MetricProfile::asymptotically_flat(0.01, 1, 1), 1.0, 20, 3, g);
  CHECK(af.worst_ratio <= 1.02);
  CHECK(af.within_bound());
  CHECK(af.c_phi == doctest::Approx(0.01).epsilon(1e-6));
}
