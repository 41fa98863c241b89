#pragma once

#include <vector>

namespace bt::fit {

/// Ordinary least squares y = slope * x + intercept.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Value at 1/N = 0 of the polynomial in 1/N interpolating (N_i, y_i).
/// With n points this removes the 1/N .. 1/N^{n-1} corrections exactly.
double extrapolate_inv_n(const std::vector<double>& N, const std::vector<double>& y);

}  // namespace bt::fit
