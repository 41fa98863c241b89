#pragma once

#include <Eigen/Dense>

#include "series.hpp"

namespace bt::hj {

using series::cplx;
using series::PowerSeries;

struct DegenerateMinimumError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Symplectic normal form of a positive-definite 2x2 Hessian form
/// f = <v, Qv> + O(3): Q = lambda S^T S with S in SL(2, R), and the polar
/// pieces S = U1 D U2 with rotations U1, U2 and D = diag(mu, 1/mu).
struct SymplecticDiag {
  double lambda = 0.0;  // sqrt(det Q)
  double mu = 1.0;      // >= 1
  Eigen::Matrix2d Q, S, U1, U2, D;
  double contraction = 0.0;  // (mu - 1/mu)/(mu + 1/mu), in [0, 1)
};
SymplecticDiag symplectic_diagonalize(const Eigen::Matrix2d& Q);

/// Solution of the complex Hamilton-Jacobi system at a non-degenerate
/// minimum in one complex variable. All series share the degree of f_tilde.
struct HJSolution {
  PowerSeries gamma;   // gamma(x, z): inverse of wbar -> 2 d_x phi~(x, wbar)
  PowerSeries f1;      // modified hamiltonian f~(x, gamma(x, z))
  PowerSeries F;       // generating series, F' = z_c
  PowerSeries phi;     // phase F - 2 phi~(x, 0)
  PowerSeries z_c;     // F'
  PowerSeries ybar_c;  // gamma(x, z_c(x))
  cplx slope;          // phi = slope/2 x^2 + O(x^3); the root with |slope| < 1
};

/// f_tilde: polarized symbol germ in (x, wbar) with f(0) = 0, df(0) = 0 and
/// positive-definite Hessian. phi_tilde: polarized Kahler potential.
HJSolution solve_hj(const PowerSeries& f_tilde, const PowerSeries& phi_tilde);

struct HJResidual {
  double eikonal;    // max coefficient of f~(x, ybar_c(x))
  double transport;  // max coefficient of -2 d1 phi~(x, ybar_c) + 2 d1 phi~(x, 0) + phi'
};
HJResidual hj_residual(const PowerSeries& f_tilde, const PowerSeries& phi_tilde,
                       const HJSolution& s);

/// max over |x| = radius of |phi(x)| / (|x|^2 / 2); the phase is admissible
/// on the disk when this is < 1.
double admissibility_margin(const PowerSeries& phi, double radius, int nsamples = 256);

/// Hessian form Q of a polarized germ: f = <v, Qv> + O(3) in v = (q, p),
/// x = q + i p. For f2 = c20 x^2 + c11 x xbar + c02 xbar^2 (c02 = conj(c20)):
/// Q = [[c11/2 + Re c20, -Im c20], [-Im c20, c11/2 - Re c20]] * 2 ... see impl.
Eigen::Matrix2d hessian_form(const PowerSeries& f_tilde);

}  // namespace bt::hj
