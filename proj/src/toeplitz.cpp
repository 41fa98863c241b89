#include "toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>

namespace bt::quant {

namespace {
constexpr double kPi = std::numbers::pi;
}

ToeplitzMatrix build_toeplitz(const KahlerModel& model, const SymbolOnChart& f, int N,
                              int quad_refine, int n_theta) {
  int n = model.basis_size(N);
  int band = 0;
  for (int m : f.angular_modes) band = std::max(band, m);
  if (n_theta <= 0) n_theta = std::max(32, 4 * band + 8);

  models::Grid1D grid = model.radial_grid(N, quad_refine);
  size_t nq = grid.x.size();

  // Angular transform of the symbol at every radial node.
  std::vector<double> r(nq), log_r2(nq), log_dens(nq);
  for (size_t i = 0; i < nq; ++i) {
    double r2 = model.radial_to_r2(grid.x[i]);
    r[i] = std::sqrt(r2);
    log_r2[i] = std::log(r2);
    log_dens[i] = model.log_radial_density(N, grid.x[i]);
  }
  std::vector<std::vector<cplx>> F(f.angular_modes.size(), std::vector<cplx>(nq, 0.0));
  for (size_t i = 0; i < nq; ++i) {
    for (int j = 0; j < n_theta; ++j) {
      double th = 2.0 * kPi * j / n_theta;
      double val = f.eval(r[i], th);
      for (size_t mi = 0; mi < f.angular_modes.size(); ++mi) {
        double mth = f.angular_modes[mi] * th;
        F[mi][i] += val * cplx(std::cos(mth), -std::sin(mth));
      }
    }
    for (auto& Fm : F) Fm[i] /= static_cast<double>(n_theta);
  }

  std::vector<double> half_log_norm2(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k)
    half_log_norm2[static_cast<size_t>(k)] = 0.5 * model.log_norm2(N, k);

  ToeplitzMatrix T;
  T.N = N;
  T.n = n;
  T.band = band;
  T.M = Eigen::MatrixXcd::Zero(n, n);
  double pref = model.density_prefactor(N);
  for (size_t mi = 0; mi < f.angular_modes.size(); ++mi) {
    int m = f.angular_modes[mi];
    for (int k = 0; k + m < n; ++k) {
      int j = k + m;
      cplx acc = 0.0;
      double lognorm = half_log_norm2[static_cast<size_t>(j)] +
                       half_log_norm2[static_cast<size_t>(k)];
      for (size_t i = 0; i < nq; ++i) {
        double L = 0.5 * (j + k) * log_r2[i] + log_dens[i] - lognorm;
        if (L < -745.0) continue;
        acc += grid.w[i] * std::exp(L) * F[mi][i];
      }
      acc *= pref;
      T.M(j, k) = acc;
      if (m != 0) T.M(k, j) = std::conj(acc);
    }
  }
  return T;
}

std::vector<double> eigenvalues_eigen(const ToeplitzMatrix& T) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(T.M, Eigen::EigenvaluesOnly);
  std::vector<double> ev(static_cast<size_t>(T.n));
  for (int i = 0; i < T.n; ++i) ev[static_cast<size_t>(i)] = es.eigenvalues()(i);
  return ev;
}

std::vector<double> eigenvalues_lapack_dense(const ToeplitzMatrix& T) {
  Eigen::MatrixXcd A = T.M;
  std::vector<double> ev(static_cast<size_t>(T.n));
  lapack_int info = LAPACKE_zheev(LAPACK_COL_MAJOR, 'N', 'L', T.n, A.data(), T.n, ev.data());
  if (info != 0) throw std::runtime_error("zheev failed");
  return ev;
}

std::vector<double> eigenvalues_lapack_banded(const ToeplitzMatrix& T) {
  int n = T.n, kd = T.band;
  int ldab = kd + 1;
  std::vector<cplx> ab(static_cast<size_t>(ldab) * static_cast<size_t>(n), 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = j; i <= std::min(n - 1, j + kd); ++i)
      ab[static_cast<size_t>(i - j) + static_cast<size_t>(j) * static_cast<size_t>(ldab)] =
          T.M(i, j);
  std::vector<double> ev(static_cast<size_t>(n));
  lapack_int info = LAPACKE_zhbev(LAPACK_COL_MAJOR, 'N', 'L', n, kd, ab.data(), ldab,
                                  ev.data(), nullptr, 1);
  if (info != 0) throw std::runtime_error("zhbev failed");
  return ev;
}

std::vector<double> eigenvalues(const ToeplitzMatrix& T) {
  if (T.n > 256 && T.band > 0 && T.band * 8 < T.n) return eigenvalues_lapack_banded(T);
  return eigenvalues_eigen(T);
}

EmbeddedState embed_state(const KahlerModel& model, int N,
                          const std::function<cplx(cplx)>& germ, double r_disk,
                          int n_theta, int radial_panels) {
  int n = model.basis_size(N);
  models::Grid1D grid = models::panel_grid(0.0, r_disk, radial_panels, 8);
  size_t nq = grid.x.size();
  double pref = model.density_prefactor(N);

  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
  double mass_total = 0.0, mass_outer = 0.0;
  std::vector<cplx> Ghat(static_cast<size_t>(n));
  for (size_t i = 0; i < nq; ++i) {
    double r = grid.x[i];
    double r2 = r * r;
    // angular transform of the germ at radius r
    std::fill(Ghat.begin(), Ghat.end(), cplx(0.0));
    double g2 = 0.0;
    for (int j = 0; j < n_theta; ++j) {
      double th = 2.0 * kPi * j / n_theta;
      cplx y = std::polar(r, th);
      cplx G = germ(y);
      g2 += std::norm(G);
      cplx rot = std::polar(1.0, -th);
      cplx ph = G;
      for (int k = 0; k < n; ++k) {
        Ghat[static_cast<size_t>(k)] += ph;
        ph *= rot;
      }
    }
    double log_dens = model.kind == models::ModelKind::Bargmann
                          ? -N * r2
                          : -(N + 2) * std::log1p(r2);
    for (int k = 0; k < n; ++k) {
      double L = k * std::log(r) + log_dens - 0.5 * model.log_norm2(N, k);
      if (L < -745.0 || r == 0.0) {
        if (k > 0) continue;
        L = log_dens - 0.5 * model.log_norm2(N, 0);
      }
      v(k) += grid.w[i] * r * std::exp(L) * Ghat[static_cast<size_t>(k)] *
              (2.0 * pref / n_theta);
    }
    double node_mass = grid.w[i] * r * std::exp(log_dens) * g2 * (2.0 * pref / n_theta);
    mass_total += node_mass;
    if (r > 0.9 * r_disk) mass_outer += node_mass;
  }

  EmbeddedState out;
  out.norm = v.norm();
  if (out.norm == 0.0) throw std::runtime_error("embedded state vanished");
  out.v = v / out.norm;
  double top = 0.0;
  for (int k = std::max(0, n - 3); k < n; ++k) top += std::norm(out.v(k));
  out.tail_basis = top;
  out.tail_radial = mass_total > 0.0 ? mass_outer / mass_total : 0.0;
  return out;
}

double rayleigh_quotient(const ToeplitzMatrix& T, const Eigen::VectorXcd& v) {
  return (v.adjoint() * (T.M * v))(0, 0).real() / v.squaredNorm();
}

double relative_residual(const ToeplitzMatrix& T, const Eigen::VectorXcd& v, double lambda) {
  return (T.M * v - lambda * v).norm() / v.norm();
}

}  // namespace bt::quant
