#include "wkb.hpp"

#include <cmath>

namespace bt::wkb {

using series::MultiIndex;

PowerSeries StationaryPhase::lift_x(const PowerSeries& u1) const {
  PowerSeries out(3, D);
  for (int k = 0; k <= std::min(D, u1.max_degree()); ++k) {
    cplx c = u1.coeff(MultiIndex{k});
    if (c != cplx(0.0)) out.set_coeff(MultiIndex{k, 0, 0}, c);
  }
  return out;
}

PowerSeries StationaryPhase::lift_shift(const PowerSeries& u1) const {
  return u1.truncated(D).compose({x3 + s3});
}

PowerSeries StationaryPhase::lift_germ(const PowerSeries& a2) const {
  // precomputed arguments live in phi3's ring; rebuild the critical-point lift
  // via composition with (x + s, ybar_c(x) + t): the t3 member already holds
  // ybar_c + t (set up in make_stationary_phase).
  return a2.truncated(D).compose({x3 + s3, t3});
}

namespace {

// Drop monomials whose (s,t)-degree is odd or exceeds max_st: the Wick
// contractions remove (s,t)-powers two at a time, so such monomials can
// never reach the (s,t)-constant term.
PowerSeries prune_st(const PowerSeries& F, int max_st) {
  PowerSeries out(3, F.max_degree());
  const auto& lay = F.layout();
  for (int p = 0; p < lay.size(); ++p) {
    cplx c = F.at(p);
    if (c == cplx(0.0)) continue;
    const MultiIndex& mi = lay.index(p);
    int st = mi[1] + mi[2];
    if (st > max_st || st % 2 != 0) continue;
    out.set_at(p, c);
  }
  return out;
}

}  // namespace

std::vector<PowerSeries> StationaryPhase::expand(const PowerSeries& a, int P) const {
  std::vector<PowerSeries> out(static_cast<size_t>(P) + 1, PowerSeries(1, D));
  auto restrict_st = [&](const PowerSeries& F) {
    PowerSeries r(1, D);
    for (int k = 0; k <= D; ++k) {
      cplx c = F.coeff(MultiIndex{k, 0, 0});
      if (c != cplx(0.0)) r.set_coeff(MultiIndex{k}, c);
    }
    return r;
  };
  auto L = [&](const PowerSeries& F) {
    PowerSeries dst = F.differentiate(1).differentiate(2).extended(D);
    PowerSeries dtt = F.differentiate(2).differentiate(2).extended(D);
    return g_st * dst + g_tt * (0.5 * dtt);
  };
  for (int m = 0; m <= 2 * P; ++m) {
    if (m >= static_cast<int>(phi3_pow.size())) break;
    int qmax = m + P;
    PowerSeries Lq = prune_st(a * phi3_pow[static_cast<size_t>(m)], 2 * qmax);
    double mfact = series::factorial(m);
    if (m == 0) out[0] += restrict_st(Lq);
    double qfact = 1.0;
    for (int q = 1; q <= qmax; ++q) {
      Lq = prune_st(L(Lq), 2 * (qmax - q));
      qfact *= q;
      int p = q - m;
      if (p >= 0 && p <= P) out[static_cast<size_t>(p)] += restrict_st(Lq) * (1.0 / (qfact * mfact));
      if (Lq.is_zero()) break;
    }
  }
  for (auto& T : out) T = pref * T;
  return out;
}

StationaryPhase make_stationary_phase(const models::KahlerModel& model,
                                      const hj::HJSolution& hj, int D, int max_order) {
  StationaryPhase sp;
  sp.D = D;
  sp.x3 = PowerSeries::variable(3, D, 0);
  sp.s3 = PowerSeries::variable(3, D, 1);
  PowerSeries t3 = PowerSeries::variable(3, D, 2);
  PowerSeries ybc3 = sp.lift_x(hj.ybar_c);
  sp.t3 = ybc3 + t3;  // wbar argument of germ lifts

  PowerSeries phi_t = model.polarized_potential(D);
  PowerSeries y3 = sp.x3 + sp.s3;
  PowerSeries F3x = sp.lift_x(hj.F.truncated(D));
  PowerSeries phase = phi_t.compose({sp.x3, sp.t3}) * 2.0 -
                      phi_t.compose({y3, sp.t3}) * 2.0 +
                      hj.F.truncated(D).compose({y3}) - F3x;

  // split off the (s,t)-jet of order <= 2 and read the Hessian from it
  PowerSeries h_ss(1, D), h_st(1, D), h_tt(1, D);
  PowerSeries phi3 = phase;
  double jet1 = 0.0;
  const auto& lay = phase.layout();
  for (int p = 0; p < lay.size(); ++p) {
    const MultiIndex& mi = lay.index(p);
    int st = mi[1] + mi[2];
    if (st > 2) continue;
    cplx c = phase.at(p);
    phi3.set_at(p, 0.0);
    if (c == cplx(0.0)) continue;
    int k = mi[0];
    if (st <= 1) {
      jet1 = std::max(jet1, std::abs(c));  // should vanish by the critical equations
      continue;
    }
    if (mi[1] == 2) h_ss.set_coeff(MultiIndex{k}, h_ss.coeff(MultiIndex{k}) + 2.0 * c);
    if (mi[1] == 1 && mi[2] == 1) h_st.set_coeff(MultiIndex{k}, c);
    if (mi[2] == 2) h_tt.set_coeff(MultiIndex{k}, h_tt.coeff(MultiIndex{k}) + 2.0 * c);
  }
  sp.jet_defect = jet1;
  if (h_tt.max_abs_coeff() > 1e-10)
    throw InsufficientDegreeError("phase t-t block unexpectedly non-zero");
  // -H = [[-h_ss, -h_st], [-h_st, 0]]; with b = -h_st (b(0) = 1):
  //   G = (-H)^{-1} = [[0, 1/b], [1/b, h_ss / b^2]],  pref = (b^2)^{-1/2} = 1/b.
  PowerSeries b = -h_st;
  if (std::abs(b.coeff(MultiIndex{0}) - cplx(1.0)) > 1e-9)
    throw InsufficientDegreeError("phase Hessian normalization is off at the base point");
  PowerSeries binv = b.reciprocal();
  sp.pref = binv;
  sp.g_st = sp.lift_x(binv);
  sp.g_tt = sp.lift_x(h_ss * binv * binv);
  sp.phi3 = phi3;
  sp.phi3_pow.push_back(PowerSeries::constant(3, D, 1.0));
  for (int m = 1; m <= 2 * max_order; ++m) {
    // Only monomials with (s,t)-degree <= 2(m + max_order) can survive the
    // contractions; pruning keeps high powers sparse. The bound is safe for
    // higher powers too, since every extra factor adds (s,t)-degree >= 3
    // while the allowance only grows by 2.
    PowerSeries next = sp.phi3_pow.back() * phi3;
    PowerSeries pruned(3, D);
    const auto& play = next.layout();
    for (int p = 0; p < play.size(); ++p) {
      cplx c = next.at(p);
      if (c == cplx(0.0)) continue;
      const MultiIndex& mi = play.index(p);
      if (mi[1] + mi[2] > 2 * (m + max_order)) continue;
      pruned.set_at(p, c);
    }
    sp.phi3_pow.push_back(pruned);
    if (pruned.is_zero()) break;
  }
  return sp;
}

double WKBExpansion::lambda_of_N(double N, int kmax) const {
  double acc = 0.0, w = 1.0 / N;
  for (int k = 0; k <= kmax && k < static_cast<int>(lambda.size()); ++k, w /= N)
    acc += w * lambda[static_cast<size_t>(k)];
  return acc + offset;
}

cplx WKBExpansion::quasimode_germ(double N, int kmax, cplx y) const {
  cplx U = 0.0;
  double w = 1.0;
  for (int k = 0; k <= kmax && k < static_cast<int>(u.size()); ++k, w /= N)
    U += w * u[static_cast<size_t>(k)].evaluate({y});
  return U * std::exp(N * hj.F.evaluate({y}));
}

WKBExpansion build_wkb(const models::KahlerModel& model, const PowerSeries& f_tilde,
                       const WKBOptions& opts) {
  WKBExpansion w;
  int K = opts.K;
  int D = opts.D > 0 ? opts.D : 2 * K + 4;
  if (D - 2 * K < 2)
    throw InsufficientDegreeError("series degree budget too small for the requested order");
  w.model = model;
  w.offset = f_tilde.coeff(MultiIndex{0, 0}).real();
  w.f_tilde = f_tilde.extended(D);
  w.f_tilde.set_coeff(MultiIndex{0, 0}, 0.0);

  w.hj = hj::solve_hj(w.f_tilde, model.polarized_potential(D + 1));
  int P = K + 1;
  w.sp = make_stationary_phase(model, w.hj, D, P);

  // measure terms (exact for both built-in models)
  std::vector<PowerSeries> mterms = model.measure_terms(D, 2);
  int jmax_meas = model.kind == models::ModelKind::Bargmann ? 0 : 1;

  // base amplitudes lifted to the oscillatory ring
  std::vector<PowerSeries> Bj;
  for (int j = 0; j <= jmax_meas; ++j)
    Bj.push_back(w.sp.lift_germ(w.f_tilde * mterms[static_cast<size_t>(j)]));

  // first-order transport data: SP_1 applied to B_0 s^i gives the u^{(i)}
  // coefficients; i >= 2 must vanish for the hierarchy to close as an ODE.
  auto sp1 = [&](const PowerSeries& amp) { return w.sp.expand(amp, 1)[1]; };
  w.A = sp1(Bj[0]);
  w.B = sp1(Bj[0] * w.sp.s3);
  w.transport_tail_defect = std::max(sp1(Bj[0] * w.sp.s3 * w.sp.s3).max_abs_coeff(),
                                     sp1(Bj[0] * w.sp.s3 * w.sp.s3 * w.sp.s3).max_abs_coeff());

  cplx lambda0 = w.A.coeff(MultiIndex{0});
  cplx freq = w.B.coeff(MultiIndex{1});
  if (std::abs(freq) < 1e-10)
    throw hj::DegenerateMinimumError("vanishing transport frequency in the expansion");

  transport::VectorField X;
  X.lambda = {freq};
  PowerSeries Bhat = w.B;
  Bhat.set_coeff(MultiIndex{1}, 0.0);
  X.higher = {Bhat};
  PowerSeries h = PowerSeries::constant(1, D, lambda0) - w.A;
  h.set_coeff(MultiIndex{0}, 0.0);  // exact by construction; clear roundoff

  w.lambda.assign(static_cast<size_t>(K) + 1, 0.0);
  w.u.assign(static_cast<size_t>(K) + 1, PowerSeries(1, D));
  w.trust_degree.assign(static_cast<size_t>(K) + 1, D);
  w.lambda[0] = lambda0.real();
  w.lambda_imag_max = std::abs(lambda0.imag());

  // u_0 = 1 + v_0
  PowerSeries v0 = transport::solve_transport(X, h, h);
  w.u[0] = PowerSeries::constant(1, D, 1.0) + v0;
  w.trust_degree[0] = D - 2;

  // cached oscillatory expansions of B_j u_l for all orders p <= P
  std::vector<std::vector<std::vector<PowerSeries>>> cache(
      static_cast<size_t>(K) + 1,
      std::vector<std::vector<PowerSeries>>(static_cast<size_t>(jmax_meas) + 1));
  auto ensure_cache = [&](int l) {
    if (!cache[static_cast<size_t>(l)][0].empty()) return;
    PowerSeries ul3 = w.sp.lift_shift(w.u[static_cast<size_t>(l)]);
    for (int j = 0; j <= jmax_meas; ++j)
      cache[static_cast<size_t>(l)][static_cast<size_t>(j)] =
          w.sp.expand(Bj[static_cast<size_t>(j)] * ul3, P);
  };

  for (int k = 1; k <= K; ++k) {
    PowerSeries R(1, D);
    for (int l = 0; l <= k - 1; ++l) {
      ensure_cache(l);
      for (int j = 0; j <= jmax_meas; ++j) {
        int p = k + 1 - l - j;
        if (p < 1 || p > P) continue;
        R += cache[static_cast<size_t>(l)][static_cast<size_t>(j)][static_cast<size_t>(p)];
      }
    }
    cplx lk = R.coeff(MultiIndex{0});
    w.lambda[static_cast<size_t>(k)] = lk.real();
    w.lambda_imag_max = std::max(w.lambda_imag_max, std::abs(lk.imag()));
    PowerSeries g = w.u[0] * lk - R;
    for (int j = 1; j <= k - 1; ++j)
      g += w.u[static_cast<size_t>(k - j)] * cplx(w.lambda[static_cast<size_t>(j)]);
    g.set_coeff(MultiIndex{0}, 0.0);  // g(0) = lambda_k - R(0) = 0 up to roundoff
    w.u[static_cast<size_t>(k)] = transport::solve_transport(X, h, g);
    w.trust_degree[static_cast<size_t>(k)] = std::max(0, D - 2 * k - 2);
  }

  // independent re-derivation of the first order identities: the full
  // oscillatory expansion of sum_{p+j+l = k+1} must match sum_{j+l=k}
  // lambda_j u_l coefficient by coefficient.
  double defect = 0.0;
  for (int k = 0; k <= std::min(K, opts.check_orders); ++k) {
    PowerSeries lhs(1, D);
    for (int l = 0; l <= k; ++l) {
      ensure_cache(l);
      for (int j = 0; j <= jmax_meas; ++j) {
        int p = k + 1 - l - j;
        if (p < 0 || p > P) continue;
        lhs += cache[static_cast<size_t>(l)][static_cast<size_t>(j)][static_cast<size_t>(p)];
      }
    }
    PowerSeries rhs(1, D);
    for (int j = 0; j <= k; ++j)
      rhs += w.u[static_cast<size_t>(k - j)] * cplx(w.lambda[static_cast<size_t>(j)]);
    PowerSeries diff = (lhs - rhs).truncated(std::max(0, D - 2 * k - 2));
    defect = std::max(defect, diff.max_abs_coeff());
  }
  w.order_defect = defect;
  return w;
}

std::vector<symbols::NormSample> wkb_norm_samples(const WKBExpansion& w, int jmax) {
  std::vector<symbols::NormSample> out;
  for (int k = 0; k < static_cast<int>(w.u.size()); ++k) {
    out.push_back({0, k, std::abs(w.lambda[static_cast<size_t>(k)])});
    for (int j = 0; j <= std::min(jmax, w.trust_degree[static_cast<size_t>(k)]); ++j) {
      double v = w.u[static_cast<size_t>(k)].cj_norm_at0(j);
      out.push_back({j, k, v});
    }
  }
  return out;
}

}  // namespace bt::wkb
