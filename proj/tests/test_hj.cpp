#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hj.hpp"
#include "models.hpp"

using namespace bt::hj;
using bt::models::KahlerModel;
using bt::series::cplx;
using bt::series::MultiIndex;
using bt::series::PowerSeries;

namespace {

// a q^2 + b p^2 polarized: q -> (x + wbar)/2, p -> (x - wbar)/(2i)
PowerSeries quadratic_germ(double a, double b, int D) {
  PowerSeries f(2, D);
  f.set_coeff(MultiIndex{2, 0}, (a - b) / 4.0);
  f.set_coeff(MultiIndex{0, 2}, (a - b) / 4.0);
  f.set_coeff(MultiIndex{1, 1}, (a + b) / 2.0);
  return f;
}

// tilted sphere well: f = (1 + n3)(1 + alpha n1) + beta n1^2 in the chart at
// the south pole, with n3 -> (x wbar - 1)/(1 + x wbar), n1 -> (x + wbar)/(1 + x wbar)
PowerSeries tilted_well_germ(double alpha, double beta, int D) {
  PowerSeries one = PowerSeries::constant(2, D, 1.0);
  PowerSeries xw = PowerSeries::variable(2, D, 0) * PowerSeries::variable(2, D, 1);
  PowerSeries inv = (one + xw).reciprocal();
  PowerSeries n3p1 = xw * inv * 2.0;  // 1 + n3
  PowerSeries n1 = (PowerSeries::variable(2, D, 0) + PowerSeries::variable(2, D, 1)) * inv;
  return n3p1 * (one + n1 * alpha) + n1 * n1 * beta;
}

}  // namespace

TEST_CASE("symplectic diagonalization of diag(a, b)") {
  double a = 3.0, b = 0.75;
  Eigen::Matrix2d Q = Eigen::Vector2d(a, b).asDiagonal();
  auto d = symplectic_diagonalize(Q);
  CHECK(d.lambda == doctest::Approx(std::sqrt(a * b)).epsilon(1e-13));
  CHECK(d.mu == doctest::Approx(std::pow(a / b, 0.25)).epsilon(1e-12));
  CHECK(d.contraction ==
        doctest::Approx((std::sqrt(a) - std::sqrt(b)) / (std::sqrt(a) + std::sqrt(b)))
            .epsilon(1e-12));
}

TEST_CASE("symplectic invariants hold for random SPD forms") {
  std::vector<Eigen::Matrix2d> cases;
  for (double t : {0.3, 1.1, 2.4}) {
    Eigen::Matrix2d R;
    R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    Eigen::Matrix2d Q = R * Eigen::Vector2d(1.7, 0.4).asDiagonal() * R.transpose();
    cases.push_back(Q);
  }
  for (const auto& Q : cases) {
    auto d = symplectic_diagonalize(Q);
    CHECK((Q - d.lambda * d.S.transpose() * d.S).norm() < 1e-12);
    CHECK((d.S - d.U1 * d.D * d.U2).norm() < 1e-12);
    CHECK(std::abs(d.S.determinant() - 1.0) < 1e-12);
    CHECK(std::abs(d.U1.determinant() - 1.0) < 1e-12);
    CHECK(d.mu >= 1.0);
    CHECK(d.contraction >= 0.0);
    CHECK(d.contraction < 1.0);
  }
}

TEST_CASE("hessian form of a polarized quadratic") {
  auto Q = hessian_form(quadratic_germ(2.0, 0.5, 6));
  CHECK(Q(0, 0) == doctest::Approx(2.0));
  CHECK(Q(1, 1) == doctest::Approx(0.5));
  CHECK(std::abs(Q(0, 1)) < 1e-14);
}

TEST_CASE("plane anisotropic oscillator has the linear stable branch") {
  double a = 2.0, b = 0.5;
  int D = 14;
  auto phi_t = KahlerModel::bargmann().polarized_potential(D + 1);
  auto s = solve_hj(quadratic_germ(a, b, D), phi_t);
  double A = -(std::sqrt(a) - std::sqrt(b)) / (std::sqrt(a) + std::sqrt(b));
  CHECK(std::abs(s.slope - cplx(A)) < 1e-12);
  // phase is exactly (A/2) x^2, critical section exactly A x
  CHECK(std::abs(s.phi.coeff(MultiIndex{2}) - cplx(A / 2.0)) < 1e-12);
  CHECK((s.phi - PowerSeries::monomial(1, s.phi.max_degree(), MultiIndex{2}, A / 2.0))
            .max_abs_coeff() < 1e-11);
  CHECK((s.ybar_c - PowerSeries::monomial(1, D, MultiIndex{1}, A)).max_abs_coeff() < 1e-11);
  auto r = hj_residual(quadratic_germ(a, b, D), phi_t, s);
  CHECK(r.eikonal < 1e-11);
  CHECK(r.transport < 1e-11);
  CHECK(admissibility_margin(s.phi, 0.5) == doctest::Approx(std::abs(A)).epsilon(1e-9));
}

TEST_CASE("plane quartic well") {
  int D = 12;
  double eps = 0.01;
  PowerSeries f = quadratic_germ(1.0, 1.0, D);
  f.set_coeff(MultiIndex{4, 0}, eps);
  f.set_coeff(MultiIndex{0, 4}, eps);
  auto phi_t = KahlerModel::bargmann().polarized_potential(D + 1);
  auto s = solve_hj(f, phi_t);
  CHECK(std::abs(s.slope) < 1e-13);  // isotropic quadratic part
  CHECK(std::abs(s.phi.coeff(MultiIndex{4}) - cplx(-eps / 4.0)) < 1e-12);
  auto r = hj_residual(f, phi_t, s);
  CHECK(r.eikonal < 1e-12);
  CHECK(r.transport < 1e-12);
}

TEST_CASE("sphere tilted well solves the eikonal equation to high degree") {
  int D = 18;
  PowerSeries f = tilted_well_germ(0.25, 0.35, D);
  CHECK(f.hermitian_defect() < 1e-13);
  auto phi_t = KahlerModel::cp1().polarized_potential(D + 1);
  auto s = solve_hj(f, phi_t);
  auto r = hj_residual(f, phi_t, s);
  // trust through degree D - 2; the top two degrees carry truncation junk
  PowerSeries X1 = PowerSeries::variable(1, D, 0);
  PowerSeries eik = f.compose({X1, s.ybar_c}).truncated(D - 2);
  CHECK(eik.max_abs_coeff() < 1e-10);
  CHECK(std::abs(s.slope) < 1.0);
  CHECK(admissibility_margin(s.phi, 0.4) < 1.0);
  (void)r;
}

TEST_CASE("degenerate minima are rejected") {
  int D = 8;
  auto phi_t = KahlerModel::bargmann().polarized_potential(D + 1);
  PowerSeries f(2, D);
  f.set_coeff(MultiIndex{1, 0}, 1.0);  // non-critical point
  CHECK_THROWS_AS(solve_hj(f, phi_t), DegenerateMinimumError);
  // a q^2 with b = 0: not positive definite
  CHECK_THROWS_AS(solve_hj(quadratic_germ(1.0, 0.0, D), phi_t), DegenerateMinimumError);
  Eigen::Matrix2d Qbad;
  Qbad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(symplectic_diagonalize(Qbad), DegenerateMinimumError);
}
