#pragma once

#include <functional>
#include <vector>

#include "series.hpp"

namespace bt::models {

using series::cplx;
using series::PowerSeries;

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
GaussRule gauss_legendre(int n);

/// Composite Gauss grid on [a, b] with `panels` equal panels.
struct Grid1D {
  std::vector<double> x;
  std::vector<double> w;
};
Grid1D panel_grid(double a, double b, int panels, int per_panel);

enum class ModelKind { Bargmann, CP1 };

/// Geometry of the quantized phase space in a fixed holomorphic chart
/// centred at the distinguished point. Two exact models are provided:
///  - Bargmann plane: potential |z|^2 / 2, reproducing kernel e^{N z wbar};
///  - round sphere (one chart): potential log(1 + |z|^2) / 2, kernel
///    (1 + z wbar)^N, holomorphic sections of degree N.
/// Inner product convention: <u, v> = int u conj(v) e^{-2N phi} dV with
/// dV = (N/pi) dA on the plane and ((N+1)/pi) (1+|z|^2)^{-2} dA on the sphere,
/// so the monomial norms are ||z^k||^2 = k!/N^k and 1/binom(N, k).
struct KahlerModel {
  ModelKind kind = ModelKind::Bargmann;
  // Plane-model basis truncation: keep monomials z^k for k < 8N + cap_offset.
  int cap_offset = 64;
  double plane_s_max = 40.0;  // radial cutoff in s = |z|^2 for plane quadrature

  static KahlerModel bargmann();
  static KahlerModel cp1();
  static KahlerModel from_json(const nlohmann::json& j);

  /// Kahler potential at |z|^2 = r2.
  double potential(double r2) const;
  /// Polarized potential germ phi~(x, wbar), phi~(x, conj(x)) = phi(x).
  PowerSeries polarized_potential(int max_degree) const;
  /// Terms m_k(y, wbar) of the kernel measure symbol: the exact identity
  /// dV(y) = sum_k N^{-k} m_k(y, ybar) e^{2N phi~ ...} holds with
  /// m = (1, 0, ...) on the plane and m_0 = m_1 = (1 + y wbar)^{-2} on the
  /// sphere (from the prefactor N + 1 = N (1 + 1/N)).
  std::vector<PowerSeries> measure_terms(int max_degree, int nterms) const;

  int basis_size(int N) const;  // sphere: N + 1; plane: 8N + cap_offset
  double log_norm2(int N, int k) const;

  /// Radial grid in the model variable (s = r^2 on the plane, t = r^2/(1+r^2)
  /// on the sphere), refined with N.
  Grid1D radial_grid(int N, int refine = 1) const;
  double radial_to_r2(double xi) const;
  /// log of the radial density against d(xi): plane e^{-N s} -> -N s;
  /// sphere (1-t)^N -> N log(1-t). The prefactor N resp. N+1 is separate.
  double log_radial_density(int N, double xi) const;
  double density_prefactor(int N) const;  // N on the plane, N + 1 on the sphere
};

}  // namespace bt::models
