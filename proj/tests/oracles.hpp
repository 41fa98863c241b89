#pragma once

// Exact-rational mirror of the truncated power series arithmetic, used as an
// independent oracle in tests. Deliberately simple and slow.

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using rational = boost::multiprecision::cpp_rational;
using Exp = std::array<int, 4>;

struct RSeries {
  int nvars = 1;
  int max_degree = 0;
  std::map<Exp, rational> c;

  static int order(const Exp& e) { return e[0] + e[1] + e[2] + e[3]; }

  rational coeff(const Exp& e) const {
    auto it = c.find(e);
    return it == c.end() ? rational(0) : it->second;
  }
  void set(const Exp& e, rational v) {
    if (v == 0)
      c.erase(e);
    else
      c[e] = v;
  }
};

inline RSeries r_zero(int nvars, int D) { return RSeries{nvars, D, {}}; }

inline RSeries r_add(const RSeries& a, const RSeries& b) {
  RSeries out{a.nvars, std::min(a.max_degree, b.max_degree), a.c};
  for (const auto& [e, v] : b.c) out.set(e, out.coeff(e) + v);
  for (auto it = out.c.begin(); it != out.c.end();)
    it = RSeries::order(it->first) > out.max_degree ? out.c.erase(it) : std::next(it);
  return out;
}

inline RSeries r_scale(const RSeries& a, const rational& s) {
  RSeries out{a.nvars, a.max_degree, {}};
  for (const auto& [e, v] : a.c) out.set(e, v * s);
  return out;
}

inline RSeries r_mul(const RSeries& a, const RSeries& b) {
  RSeries out = r_zero(a.nvars, std::min(a.max_degree, b.max_degree));
  for (const auto& [ea, va] : a.c)
    for (const auto& [eb, vb] : b.c) {
      Exp e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]};
      if (RSeries::order(e) > out.max_degree) continue;
      out.set(e, out.coeff(e) + va * vb);
    }
  return out;
}

inline RSeries r_diff(const RSeries& a, int var) {
  RSeries out = r_zero(a.nvars, a.max_degree > 0 ? a.max_degree - 1 : 0);
  for (const auto& [e, v] : a.c) {
    if (e[static_cast<size_t>(var)] == 0) continue;
    Exp d = e;
    d[static_cast<size_t>(var)] -= 1;
    out.set(d, out.coeff(d) + v * e[static_cast<size_t>(var)]);
  }
  return out;
}

inline RSeries r_compose(const RSeries& f, const std::vector<RSeries>& g) {
  int D = g.front().max_degree;
  int gn = g.front().nvars;
  RSeries out = r_zero(gn, D);
  for (const auto& [e, v] : f.c) {
    RSeries term = r_zero(gn, D);
    term.set(Exp{0, 0, 0, 0}, v);
    for (int i = 0; i < f.nvars; ++i)
      for (int p = 0; p < e[static_cast<size_t>(i)]; ++p)
        term = r_mul(term, g[static_cast<size_t>(i)]);
    out = r_add(out, term);
  }
  return out;
}

// Solve (sum_i lambda_i x_i d_i + higher) u = h u + g with u(0) = 0, over the
// rationals, with integer linear eigenvalues.
inline RSeries r_transport(const std::vector<rational>& lambda,
                           const std::vector<RSeries>& higher, const RSeries& h,
                           const RSeries& g) {
  int nv = h.nvars;
  int D = std::min(h.max_degree, g.max_degree);
  RSeries u = r_zero(nv, D);
  for (int d = 1; d <= D; ++d) {
    RSeries rhs = r_add(r_mul(h, u), g);
    for (int i = 0; i < nv; ++i) {
      RSeries du = r_diff(u, i);
      du.max_degree = D;
      rhs = r_add(rhs, r_scale(r_mul(higher[static_cast<size_t>(i)], du), rational(-1)));
    }
    for (const auto& [e, v] : rhs.c) {
      if (RSeries::order(e) != d) continue;
      rational ev = 0;
      for (int i = 0; i < nv; ++i) ev += lambda[static_cast<size_t>(i)] * e[static_cast<size_t>(i)];
      u.set(e, v / ev);
    }
  }
  return u;
}

// Deterministic pseudo-random rationals with small numerators.
struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
  }
  int small_int(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  rational small_rational() { return rational(small_int(-9, 9), small_int(1, 7)); }
};

}  // namespace oracle
