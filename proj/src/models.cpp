#include "models.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace bt::models {

GaussRule gauss_legendre(int n) {
  // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i - 1, i) = b;
    J(i, i - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule rule;
  rule.x.resize(static_cast<size_t>(n));
  rule.w.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    rule.x[static_cast<size_t>(i)] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    rule.w[static_cast<size_t>(i)] = 2.0 * v0 * v0;
  }
  return rule;
}

Grid1D panel_grid(double a, double b, int panels, int per_panel) {
  GaussRule rule = gauss_legendre(per_panel);
  Grid1D g;
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    for (int i = 0; i < per_panel; ++i) {
      g.x.push_back(lo + 0.5 * h * (rule.x[static_cast<size_t>(i)] + 1.0));
      g.w.push_back(0.5 * h * rule.w[static_cast<size_t>(i)]);
    }
  }
  return g;
}

KahlerModel KahlerModel::bargmann() { return KahlerModel{ModelKind::Bargmann}; }
KahlerModel KahlerModel::cp1() { return KahlerModel{ModelKind::CP1}; }

KahlerModel KahlerModel::from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  KahlerModel m;
  if (kind == "bargmann")
    m = bargmann();
  else if (kind == "cp1")
    m = cp1();
  else
    throw std::invalid_argument("unknown model kind: " + kind);
  if (j.contains("bargmann_basis_cap")) m.cap_offset = j.at("bargmann_basis_cap").get<int>();
  if (j.contains("plane_s_max")) m.plane_s_max = j.at("plane_s_max").get<double>();
  return m;
}

double KahlerModel::potential(double r2) const {
  return kind == ModelKind::Bargmann ? 0.5 * r2 : 0.5 * std::log1p(r2);
}

PowerSeries KahlerModel::polarized_potential(int max_degree) const {
  PowerSeries phi(2, max_degree);
  if (kind == ModelKind::Bargmann) {
    if (max_degree >= 2) phi.set_coeff(series::MultiIndex{1, 1}, 0.5);
    return phi;
  }
  // log(1 + x wbar) / 2
  for (int k = 1; 2 * k <= max_degree; ++k)
    phi.set_coeff(series::MultiIndex{k, k}, (k % 2 == 1 ? 0.5 : -0.5) / k);
  return phi;
}

std::vector<PowerSeries> KahlerModel::measure_terms(int max_degree, int nterms) const {
  std::vector<PowerSeries> out(static_cast<size_t>(nterms), PowerSeries(2, max_degree));
  if (kind == ModelKind::Bargmann) {
    out[0] = PowerSeries::constant(2, max_degree, 1.0);
    return out;
  }
  // (1 + y wbar)^{-2} = sum (-1)^k (k+1) (y wbar)^k, carried by both the
  // N and the +1 part of the sphere prefactor N + 1.
  PowerSeries inv2(2, max_degree);
  for (int k = 0; 2 * k <= max_degree; ++k)
    inv2.set_coeff(series::MultiIndex{k, k}, (k % 2 == 0 ? 1.0 : -1.0) * (k + 1));
  out[0] = inv2;
  if (nterms > 1) out[1] = inv2;
  return out;
}

int KahlerModel::basis_size(int N) const {
  return kind == ModelKind::CP1 ? N + 1 : 8 * N + cap_offset;
}

double KahlerModel::log_norm2(int N, int k) const {
  if (kind == ModelKind::Bargmann)
    return std::lgamma(k + 1.0) - k * std::log(static_cast<double>(N));
  return -(std::lgamma(N + 1.0) - std::lgamma(k + 1.0) - std::lgamma(N - k + 1.0));
}

Grid1D KahlerModel::radial_grid(int N, int refine) const {
  if (kind == ModelKind::Bargmann) {
    // keep N * (panel width) <= 10 so GL16 resolves the e^{-N s} density
    double width = std::min(0.25, 10.0 / std::max(N, 1));
    int panels = static_cast<int>(std::ceil(plane_s_max / width)) * refine;
    return panel_grid(0.0, plane_s_max, panels, 16);
  }
  (void)N;
  int panels = 64 * refine;
  return panel_grid(0.0, 1.0, panels, 16);
}

double KahlerModel::radial_to_r2(double xi) const {
  return kind == ModelKind::Bargmann ? xi : xi / (1.0 - xi);
}

double KahlerModel::log_radial_density(int N, double xi) const {
  return kind == ModelKind::Bargmann ? -N * xi : N * std::log1p(-xi);
}

double KahlerModel::density_prefactor(int N) const {
  return kind == ModelKind::Bargmann ? static_cast<double>(N) : static_cast<double>(N + 1);
}

}  // namespace bt::models
