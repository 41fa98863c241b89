#include "fit.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace bt::fit {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need two or more matched samples");
  size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

double extrapolate_inv_n(const std::vector<double>& N, const std::vector<double>& y) {
  if (N.size() != y.size() || N.empty())
    throw std::invalid_argument("extrapolate_inv_n: need matched samples");
  int n = static_cast<int>(N.size());
  Eigen::MatrixXd V(n, n);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    double h = 1.0 / N[static_cast<size_t>(i)];
    double p = 1.0;
    for (int j = 0; j < n; ++j, p *= h) V(i, j) = p;
    rhs(i) = y[static_cast<size_t>(i)];
  }
  Eigen::VectorXd c = V.fullPivLu().solve(rhs);
  return c(0);
}

}  // namespace bt::fit
