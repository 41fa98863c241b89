#pragma once

#include "series.hpp"

namespace bt::transport {

using series::cplx;
using series::PowerSeries;

struct ResonanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Vector field X = sum_i (lambda_i x_i + a_i(x)) d/dx_i with a_i vanishing
/// to second order. The linear part must be non-resonant on the degrees that
/// appear: sum_i lambda_i mu_i != 0 for every mu != 0 up to the truncation
/// degree.
struct VectorField {
  std::vector<cplx> lambda;
  std::vector<PowerSeries> higher;  // a_i, order >= 2
};

/// Solve X u = h u + g for the unique u with u(0) = 0, degree by degree.
/// Requires h(0) = 0 and g(0) = 0.
PowerSeries solve_transport(const VectorField& X, const PowerSeries& h, const PowerSeries& g);

/// Apply X to a series (for residual checks).
PowerSeries apply_field(const VectorField& X, const PowerSeries& u);

}  // namespace bt::transport
