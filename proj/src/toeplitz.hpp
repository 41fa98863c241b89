#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "models.hpp"

namespace bt::quant {

using models::cplx;
using models::KahlerModel;

/// Real symbol sampled on the chart in polar coordinates. `angular_modes`
/// lists the non-negative Fourier modes in theta that can be non-zero; the
/// families used here are all trigonometric polynomials, so the list is
/// exact and the angular transform below is alias-free.
struct SymbolOnChart {
  std::function<double(double r, double theta)> eval;
  std::vector<int> angular_modes = {0};
};

struct ToeplitzMatrix {
  int N = 0;
  int n = 0;     // basis size
  int band = 0;  // max |j - k| with a structurally non-zero entry
  Eigen::MatrixXcd M;
};

/// Matrix of the Toeplitz operator in the orthonormal monomial basis,
/// assembled mode by mode with log-space radial weights.
ToeplitzMatrix build_toeplitz(const KahlerModel& model, const SymbolOnChart& f, int N,
                              int quad_refine = 1, int n_theta = 0);

std::vector<double> eigenvalues(const ToeplitzMatrix& T);  // picks a path by shape
std::vector<double> eigenvalues_eigen(const ToeplitzMatrix& T);
std::vector<double> eigenvalues_lapack_dense(const ToeplitzMatrix& T);
std::vector<double> eigenvalues_lapack_banded(const ToeplitzMatrix& T);

struct EmbeddedState {
  Eigen::VectorXcd v;       // components in the orthonormal basis, normalized
  double norm = 0.0;        // norm before normalization
  double tail_basis = 0.0;  // relative mass in the top basis components
  double tail_radial = 0.0; // relative disk mass in the outer 10% of radius
};

/// Project a germ G (holomorphic near 0, evaluated pointwise) onto the
/// quantum space by quadrature over the disk |y| <= r_disk.
EmbeddedState embed_state(const KahlerModel& model, int N,
                          const std::function<cplx(cplx)>& germ, double r_disk,
                          int n_theta = 256, int radial_panels = 64);

double rayleigh_quotient(const ToeplitzMatrix& T, const Eigen::VectorXcd& v);
/// ||T v - lambda v|| / ||v||.
double relative_residual(const ToeplitzMatrix& T, const Eigen::VectorXcd& v, double lambda);

}  // namespace bt::quant
