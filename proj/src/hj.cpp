#include "hj.hpp"

#include <cmath>
#include <numbers>

namespace bt::hj {

using series::MultiIndex;

SymplecticDiag symplectic_diagonalize(const Eigen::Matrix2d& Q) {
  if (std::abs(Q(0, 1) - Q(1, 0)) > 1e-12 * (1.0 + Q.norm()))
    throw DegenerateMinimumError("Hessian form is not symmetric");
  double det = Q.determinant();
  if (det <= 0.0 || Q(0, 0) <= 0.0)
    throw DegenerateMinimumError("Hessian form is not positive definite");
  SymplecticDiag out;
  out.Q = Q;
  out.lambda = std::sqrt(det);
  Eigen::Matrix2d Qn = Q / out.lambda;  // in SL(2), symmetric positive definite
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eq(Qn);
  Eigen::Vector2d se = eq.eigenvalues().array().sqrt();
  out.S = eq.eigenvectors() * se.asDiagonal() * eq.eigenvectors().transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(out.S);
  // eigenvalues ascending: 1/mu, mu; order columns so D = diag(mu, 1/mu)
  out.mu = es.eigenvalues()(1);
  Eigen::Matrix2d U;
  U.col(0) = es.eigenvectors().col(1);
  U.col(1) = es.eigenvectors().col(0);
  if (U.determinant() < 0.0) U.col(1) = -U.col(1);
  out.U1 = U;
  out.D = Eigen::Vector2d(out.mu, 1.0 / out.mu).asDiagonal();
  out.U2 = U.transpose();
  out.contraction = (out.mu - 1.0 / out.mu) / (out.mu + 1.0 / out.mu);
  return out;
}

Eigen::Matrix2d hessian_form(const PowerSeries& f_tilde) {
  cplx c20 = f_tilde.coeff(MultiIndex{2, 0});
  cplx c11 = f_tilde.coeff(MultiIndex{1, 1});
  Eigen::Matrix2d Q;
  Q(0, 0) = (c11 + 2.0 * c20).real();
  Q(1, 1) = (c11 - 2.0 * c20).real();
  Q(0, 1) = Q(1, 0) = -2.0 * c20.imag();
  return Q;
}

HJSolution solve_hj(const PowerSeries& f_tilde, const PowerSeries& phi_tilde) {
  int D = f_tilde.max_degree();
  if (f_tilde.nvars() != 2 || phi_tilde.nvars() != 2)
    throw series::DimensionError("solve_hj expects 2-variable germs (x, wbar)");
  if (std::abs(f_tilde.coeff(MultiIndex{0, 0})) > 1e-12 ||
      std::abs(f_tilde.coeff(MultiIndex{1, 0})) > 1e-12 ||
      std::abs(f_tilde.coeff(MultiIndex{0, 1})) > 1e-12)
    throw DegenerateMinimumError("symbol germ must vanish to second order at the base point");

  HJSolution s;
  // gamma: invert (x, wbar) -> (x, 2 d_x phi~).
  PowerSeries P = (phi_tilde.differentiate(0) * 2.0).truncated(D).extended(D);
  PowerSeries X2 = PowerSeries::variable(2, D, 0);
  auto inv = series::invert_map({X2, P});
  s.gamma = inv[1];
  s.f1 = f_tilde.compose({X2, s.gamma});

  cplx alpha = s.f1.coeff(MultiIndex{2, 0});
  cplx beta = s.f1.coeff(MultiIndex{1, 1});
  cplx g = s.f1.coeff(MultiIndex{0, 2});
  cplx A;
  if (std::abs(g) < 1e-14) {
    if (std::abs(beta) < 1e-14) throw DegenerateMinimumError("degenerate branch equation");
    A = -alpha / beta;
  } else {
    cplx disc = std::sqrt(beta * beta - 4.0 * alpha * g);
    cplx r1 = (-beta + disc) / (2.0 * g);
    cplx r2 = (-beta - disc) / (2.0 * g);
    A = std::abs(r1) <= std::abs(r2) ? r1 : r2;
    if (std::abs(A) > 1.0 - 1e-9)
      throw DegenerateMinimumError("no strictly contracting branch: |A| >= 1");
  }
  cplx freq = beta + 2.0 * g * A;  // +/- sqrt(beta^2 - 4 alpha g), non-zero here
  if (std::abs(freq) < 1e-12) throw DegenerateMinimumError("vanishing transport frequency");

  // w = F': fix w_{n-1} so that f1(x, w(x)) vanishes at degree n.
  PowerSeries w(1, D);
  w.set_coeff(MultiIndex{1}, A);
  PowerSeries X1 = PowerSeries::variable(1, D, 0);
  for (int n = 3; n <= D; ++n) {
    PowerSeries e = s.f1.compose({X1, w});
    cplx en = e.coeff(MultiIndex{n});
    w.set_coeff(MultiIndex{n - 1}, w.coeff(MultiIndex{n - 1}) - en / freq);
  }
  s.z_c = w;
  s.F = PowerSeries(1, D);
  for (int n = 1; n < D; ++n)
    s.F.set_coeff(MultiIndex{n + 1}, w.coeff(MultiIndex{n}) / (n + 1.0));
  s.F.set_coeff(MultiIndex{1}, 0.0);
  PowerSeries phi_x0 = phi_tilde.truncated(D).compose({X1, PowerSeries(1, D)});
  s.phi = s.F - phi_x0 * 2.0;
  s.ybar_c = s.gamma.compose({X1, w});
  s.slope = A;
  return s;
}

HJResidual hj_residual(const PowerSeries& f_tilde, const PowerSeries& phi_tilde,
                       const HJSolution& s) {
  int D = s.ybar_c.max_degree();
  PowerSeries X1 = PowerSeries::variable(1, D, 0);
  PowerSeries zero1(1, D);
  HJResidual r;
  r.eikonal = f_tilde.truncated(D).compose({X1, s.ybar_c}).max_abs_coeff();
  PowerSeries P = (phi_tilde.truncated(D + 1).differentiate(0) * 2.0).extended(D);
  PowerSeries res = -P.compose({X1, s.ybar_c}) + P.compose({X1, zero1}) +
                    s.phi.differentiate(0).extended(D);
  r.transport = res.max_abs_coeff();
  return r;
}

double admissibility_margin(const PowerSeries& phi, double radius, int nsamples) {
  double worst = 0.0;
  for (int i = 0; i < nsamples; ++i) {
    double th = 2.0 * std::numbers::pi * i / nsamples;
    cplx x = std::polar(radius, th);
    double v = std::abs(phi.evaluate({x}));
    worst = std::max(worst, v / (0.5 * radius * radius));
  }
  return worst;
}

}  // namespace bt::hj
