#include "transport.hpp"

#include <cmath>

namespace bt::transport {

namespace {

cplx linear_eigenvalue(const VectorField& X, const series::MultiIndex& mu) {
  cplx s = 0.0;
  for (size_t i = 0; i < X.lambda.size(); ++i)
    s += X.lambda[i] * static_cast<double>(mu[static_cast<int>(i)]);
  return s;
}

void validate(const VectorField& X, const PowerSeries& h, const PowerSeries& g) {
  int nv = h.nvars();
  if (g.nvars() != nv || static_cast<int>(X.lambda.size()) != nv ||
      static_cast<int>(X.higher.size()) != nv)
    throw series::DimensionError("transport: inconsistent variable counts");
  series::MultiIndex zero(nv);
  if (std::abs(h.coeff(zero)) > 1e-13 || std::abs(g.coeff(zero)) > 1e-13)
    throw series::DimensionError("transport: h and g must vanish at 0");
  for (const auto& a : X.higher) {
    if (a.nvars() != nv) throw series::DimensionError("transport: field component mismatch");
    if (a.max_degree() >= 1)
      for (int p = 0; p < a.layout().degree_end(std::min(1, a.max_degree())); ++p)
        if (std::abs(a.at(p)) > 1e-13)
          throw series::DimensionError("transport: field corrections must be O(|x|^2)");
  }
}

}  // namespace

PowerSeries solve_transport(const VectorField& X, const PowerSeries& h, const PowerSeries& g) {
  validate(X, h, g);
  int nv = h.nvars();
  int D = std::min(h.max_degree(), g.max_degree());
  PowerSeries u(nv, D);
  for (int d = 1; d <= D; ++d) {
    PowerSeries rhs = h * u + g;
    for (int i = 0; i < nv; ++i)
      rhs = rhs - X.higher[static_cast<size_t>(i)].truncated(D) * u.differentiate(i).extended(D);
    const auto& lay = u.layout();
    for (int p = lay.degree_begin(d); p < lay.degree_end(d); ++p) {
      const auto& mu = lay.index(p);
      cplx ev = linear_eigenvalue(X, mu);
      if (std::abs(ev) < 1e-12)
        throw ResonanceError("transport: resonant or vanishing linear eigenvalue");
      u.set_at(p, rhs.at(p) / ev);
    }
  }
  return u;
}

PowerSeries apply_field(const VectorField& X, const PowerSeries& u) {
  int nv = u.nvars();
  PowerSeries out(nv, u.max_degree());
  for (int i = 0; i < nv; ++i) {
    PowerSeries du = u.differentiate(i).extended(u.max_degree());
    PowerSeries xi = PowerSeries::variable(nv, u.max_degree(), i) * X.lambda[static_cast<size_t>(i)];
    out += (xi + X.higher[static_cast<size_t>(i)].truncated(u.max_degree()).extended(u.max_degree())) * du;
  }
  return out;
}

}  // namespace bt::transport
