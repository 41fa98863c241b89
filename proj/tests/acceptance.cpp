// Acceptance suite: one line per criterion, PASS or FAIL, with the measured
// quantities and the pinned tolerances printed inline. Exit code 0 only if
// every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "experiments.hpp"
#include "hj.hpp"
#include "oracles.hpp"
#include "transport.hpp"

using namespace bt;
using nlohmann::json;
using series::cplx;
using series::MultiIndex;
using series::PowerSeries;

namespace {

bool all_passed = true;

void report(bool ok, const std::string& name, const std::string& detail) {
  all_passed = all_passed && ok;
  std::printf("%s  %-52s  %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---- 1: the isotropic oscillator is reproduced to machine precision ----

void criterion_exact_isotropic() {
  wkb::WKBOptions opts;
  opts.K = 10;
  opts.D = 24;
  json spec = {{"name", "plane-isotropic"}};
  auto fam = experiments::make_family(spec);
  auto w = wkb::build_wkb(fam.model, fam.germ(opts.D), opts);

  double lam_err = std::abs(w.lambda[0] - 1.0);
  for (int k = 1; k <= opts.K; ++k)
    lam_err = std::max(lam_err, std::abs(w.lambda[static_cast<size_t>(k)]));
  double phi_err = w.hj.phi.max_abs_coeff();
  double u_err = (w.u[0] - PowerSeries::constant(1, w.u[0].max_degree(), 1.0)).max_abs_coeff();
  for (int k = 1; k <= opts.K; ++k)
    u_err = std::max(u_err, w.u[static_cast<size_t>(k)].max_abs_coeff());

  double res_max = 0.0;
  for (int N : {10, 20, 40}) {
    auto T = quant::build_toeplitz(fam.model, fam.chart, N);
    auto state = quant::embed_state(
        fam.model, N, [&](cplx y) { return w.quasimode_germ(N, opts.K, y); },
        std::min(0.45, std::sqrt(80.0 / N)));
    res_max = std::max(res_max, quant::relative_residual(T, state.v, 1.0 / N));
  }
  bool ok = lam_err < 1e-11 && phi_err < 1e-12 && u_err < 1e-10 && res_max < 1e-11;
  report(ok, "isotropic oscillator exact to machine precision",
         fmt("lambda err %.1e (<1e-11), phase %.1e (<1e-12), amplitude %.1e (<1e-10), "
             "residual %.1e (<1e-11)",
             lam_err, phi_err, u_err, res_max));
}

// ---- 2: the phase equation is solved to degree 16 ----

void criterion_phase_equation() {
  const int D = 20, trust = 16;
  double eik_max = 0.0, tr_max = 0.0, margin_max = 0.0;
  bool stable = true;
  std::vector<json> specs = {
      {{"name", "plane-quadratic"}, {"a", 2.0}, {"b", 0.5}, {"angle", 0.3}},
      {{"name", "cp1-tilted-well"}, {"alpha", 0.25}, {"beta", 0.35}}};
  for (const auto& spec : specs) {
    auto fam = experiments::make_family(spec);
    PowerSeries f = fam.germ(D);
    PowerSeries phi_t = fam.model.polarized_potential(D + 1);
    auto s = hj::solve_hj(f, phi_t);
    PowerSeries X1 = PowerSeries::variable(1, D, 0);
    eik_max = std::max(eik_max, f.compose({X1, s.ybar_c}).truncated(trust).max_abs_coeff());
    PowerSeries d1 = phi_t.differentiate(0).truncated(D);
    PowerSeries at_crit = d1.compose({X1, s.ybar_c});
    PowerSeries at_zero = d1.compose({X1, PowerSeries(1, D)});
    PowerSeries transport_res =
        at_crit * (-2.0) + at_zero * 2.0 + s.phi.differentiate(0);
    tr_max = std::max(tr_max, transport_res.truncated(trust).max_abs_coeff());
    stable = stable && std::abs(s.slope) < 1.0;
    margin_max = std::max(margin_max, hj::admissibility_margin(s.phi, 0.4));
  }
  bool ok = eik_max < 1e-10 && tr_max < 1e-10 && stable && margin_max < 1.0;
  report(ok, "phase equation solved to degree 16",
         fmt("eikonal %.1e, transport %.1e (<1e-10), stable branch %s, margin %.3f (<1)", eik_max,
             tr_max, stable ? "yes" : "no", margin_max));
}

// ---- 3: leading energy matches extrapolated spectra ----

void criterion_leading_energy() {
  std::vector<std::array<double, 3>> forms = {{1.0, 1.0, 0.0}, {2.0, 0.5, 0.0}, {1.7, 0.4, 0.6}};
  double worst = 0.0;
  for (auto [a, b, angle] : forms) {
    json spec = {{"name", "plane-quadratic"}, {"a", a}, {"b", b}, {"angle", angle}};
    auto fam = experiments::make_family(spec);
    std::vector<double> Ns = {50.0, 100.0, 200.0}, scaled;
    for (double N : Ns) {
      auto T = quant::build_toeplitz(fam.model, fam.chart, static_cast<int>(N));
      scaled.push_back(N * quant::eigenvalues(T).front());
    }
    double extrap = fit::extrapolate_inv_n(Ns, scaled);
    double want = std::pow(std::sqrt(a) + std::sqrt(b), 2) / 4.0;
    worst = std::max(worst, std::abs(extrap - want));
  }
  report(worst < 1e-6, "leading energy matches extrapolated spectra",
         fmt("max |extrapolated - closed form| = %.2e (<1e-6) over 3 quadratic forms", worst));
}

// Shared expensive expansion for criteria 4 and 8: tilted sphere well,
// ten correction orders. The ring degree 44 = 4 (K + 1) is the smallest
// at which the order-10 coefficient is fully resolved.
const json kTiltedSweep = {
    {"family", {{"name", "cp1-tilted-well"}, {"alpha", 0.25}, {"beta", 0.35}}},
    {"K", 10},
    {"D", 44},
    {"N", {40, 60, 80, 120, 160}}};

experiments::ResidualSweep& tilted_sweep() {
  static experiments::ResidualSweep sweep = experiments::run_residual_sweep(kTiltedSweep);
  return sweep;
}

// ---- 4: quasimode residual decays exponentially ----

void criterion_residual_decay() {
  const auto& s = tilted_sweep();
  double first = s.rows.front().residual, last = s.rows.back().residual;
  double ratio = last / first;
  bool ok = s.residual_fit.slope < 0.0 && s.residual_fit.r2 >= 0.98 && ratio <= 1e-3;
  report(ok, "quasimode residual decays exponentially",
         fmt("rate %.4f/level (>0), r2 %.4f (>=0.98), res %0.1e -> %0.1e, ratio %.1e (<=1e-3)",
             -s.residual_fit.slope, s.residual_fit.r2, first, last, ratio));
}

// ---- 5: eigenvalue error bounded by the residual, with matching rates ----

void criterion_error_vs_residual() {
  json cfg = {{"family", {{"name", "cp1-tilted-well"}, {"alpha", 0.25}, {"beta", 0.35}}},
              {"K", 3},
              {"D", 24},
              {"kmax", 3},
              {"N", {40, 60, 80, 120, 160}}};
  auto s = experiments::run_residual_sweep(cfg);
  bool bounded = true;
  for (const auto& r : s.rows) bounded = bounded && r.diff <= r.residual;
  double ratio = s.diff_fit.slope / s.residual_fit.slope;
  bool ok = bounded && s.residual_fit.slope < 0.0 && ratio >= 0.5 && ratio <= 2.0;
  report(ok, "eigenvalue error bounded by residual, rates match",
         fmt("|bottom - predicted| <= residual at all 5 levels: %s; rate ratio %.3f (in [0.5, 2])",
             bounded ? "yes" : "no", ratio));
}

// ---- 6: transport solver against exact and rational references ----

PowerSeries to_double_series(const oracle::RSeries& r) {
  PowerSeries f(r.nvars, r.max_degree);
  for (const auto& [e, v] : r.c) {
    MultiIndex m(r.nvars);
    for (int i = 0; i < r.nvars; ++i) m.set(i, e[static_cast<size_t>(i)]);
    f.set_coeff(m, static_cast<double>(v));
  }
  return f;
}

oracle::RSeries random_vanishing(oracle::Rng& rng, int nvars, int D, int min_order) {
  oracle::RSeries r = oracle::r_zero(nvars, D);
  PowerSeries shape(nvars, D);
  const auto& lay = shape.layout();
  for (int p = 0; p < lay.size(); ++p) {
    const MultiIndex& m = lay.index(p);
    if (m.order() < min_order) continue;
    if (rng.small_int(0, 2) != 0) continue;
    oracle::Exp e{0, 0, 0, 0};
    for (int i = 0; i < nvars; ++i) e[static_cast<size_t>(i)] = m[i];
    r.set(e, rng.small_rational());
  }
  return r;
}

void criterion_transport() {
  const int D = 12;
  transport::VectorField X{{1.0}, {PowerSeries(1, D)}};
  PowerSeries g(1, D);
  for (int k = 1; k <= D; ++k) g.set_coeff(MultiIndex{k}, 1.0 / series::factorial(k - 1));
  PowerSeries u = transport::solve_transport(X, PowerSeries(1, D), g);
  double exact_err = 0.0;
  for (int k = 1; k <= D; ++k)
    exact_err = std::max(exact_err,
                         std::abs(u.coeff(MultiIndex{k}) - cplx(1.0 / series::factorial(k))));

  oracle::Rng rng(101);
  double mirror_err = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    int nv = rng.small_int(1, 3);
    int deg = rng.small_int(4, 8);
    std::vector<oracle::rational> rl;
    transport::VectorField Y;
    for (int i = 0; i < nv; ++i) {
      int li = rng.small_int(1, 4);
      rl.push_back(li);
      Y.lambda.push_back(static_cast<double>(li));
    }
    std::vector<oracle::RSeries> rhigher;
    for (int i = 0; i < nv; ++i) {
      rhigher.push_back(random_vanishing(rng, nv, deg, 2));
      Y.higher.push_back(to_double_series(rhigher.back()));
    }
    oracle::RSeries rh = random_vanishing(rng, nv, deg, 1);
    oracle::RSeries rg = random_vanishing(rng, nv, deg, 1);
    PowerSeries v = transport::solve_transport(Y, to_double_series(rh), to_double_series(rg));
    PowerSeries want = to_double_series(oracle::r_transport(rl, rhigher, rh, rg));
    double scale = std::max(1.0, want.max_abs_coeff());
    mirror_err = std::max(mirror_err, (v - want).max_abs_coeff() / scale);
  }
  bool ok = exact_err < 1e-12 && mirror_err < 1e-12;
  report(ok, "transport solver matches exact and rational references",
         fmt("closed form err %.1e, 20 rational-mirror cases err %.1e (<1e-12)", exact_err,
             mirror_err));
}

// ---- 7: symbol algebra: inverse roundtrip and truncation tails ----

void criterion_symbol_algebra() {
  const int nterms = 81, D = 0;
  const double R = 2.0;
  symbols::AnalyticSymbol a(1, D, nterms);
  oracle::Rng rng(7);
  for (int k = 0; k < nterms; ++k) {
    double jitter = 1.0 + 0.1 * static_cast<double>(rng.small_int(-3, 3));
    a.term(k).set_coeff(MultiIndex{0},
                        (k % 2 ? -1.0 : 1.0) * jitter * std::pow(R, k) * series::factorial(k));
  }
  a.term(0).set_coeff(MultiIndex{0}, 1.0);

  // multiplicative inverse roundtrip
  auto inv = symbols::symbol_inverse(a);
  auto round = symbols::cauchy_product(a, inv);
  double round_err = 0.0;
  for (int k = 1; k < round.nterms(); ++k) {
    double scale = std::max(1.0, std::pow(R, k) * series::factorial(k));
    round_err = std::max(round_err, round.term(k).max_abs_coeff() / scale);
  }
  round_err = std::max(round_err, std::abs(round.term(0).coeff(MultiIndex{0}) - cplx(1.0)));

  // halving the truncation constant changes the sum by an exponentially
  // small amount
  std::vector<double> Ns, logdiff;
  bool monotone = true;
  double prev = 1e300;
  for (int N = 40; N <= 160; N += 20) {
    // tail between the halved and the full truncation rank, summed directly
    // (the two partial sums agree to within rounding, so subtracting them
    // would only measure noise)
    int kfull = symbols::truncation_rank(nterms, N, R);
    int khalf = symbols::truncation_rank(nterms, N, R, std::exp(1.0) / (6.0 * R));
    cplx tail = 0.0;
    for (int k = khalf + 1; k <= kfull; ++k)
      tail += std::pow(1.0 / N, k) * a.term(k).coeff(MultiIndex{0});
    double d = std::abs(tail);
    monotone = monotone && d < prev && d > 0.0;
    prev = d;
    Ns.push_back(N);
    logdiff.push_back(std::log(d));
  }
  auto tail_fit = fit::fit_line(Ns, logdiff);

  // the growth envelope fit recovers the planted radius
  auto env = symbols::fit_class_params(a, 0, 4.0, false);
  double R_rel = std::abs(env.params.R - R) / R;

  bool ok = round_err < 1e-10 && monotone && tail_fit.slope < 0.0 && tail_fit.r2 > 0.9 &&
            R_rel < 0.5;
  report(ok, "symbol algebra: inverse roundtrip and truncation tails",
         fmt("roundtrip err %.1e (<1e-10), tail rate %.3f/level (>0, r2 %.3f), fitted radius "
             "within %.0f%% (<50%%)",
             round_err, -tail_fit.slope, tail_fit.r2, 100.0 * R_rel));
}

// ---- 8: a single growth envelope covers every expansion term ----

void criterion_envelope() {
  const auto& s = tilted_sweep();
  const auto& e = s.envelope;
  bool ok = e.max_log_excess <= 1e-9 && e.params.C > 0.0 && e.params.C < 1e30 &&
            e.params.r > 0.0 && e.params.R > 0.0 && e.samples >= 121;
  report(ok, "single growth envelope covers all expansion terms",
         fmt("C %.3g, r %.3g, R %.3g over %d samples, max log excess %.1e (<=0)", e.params.C,
             e.params.r, e.params.R, e.samples, e.max_log_excess));
}

// ---- 9: symmetric wells degenerate; bumps split with ordered rates ----

void criterion_gap() {
  json sym = {{"experiment", "gap-sweep"},
              {"family", {{"name", "cp1-poly-n3"}, {"coeffs", {1.0, 0.0, -1.0}}}},
              {"N", {50, 100, 200, 300, 400}}};
  auto base = experiments::run_gap_sweep(sym);
  double base_max = *std::max_element(base.series[0].gaps.begin(), base.series[0].gaps.end());

  json bumped = sym;
  bumped["N"] = {60, 80, 100, 120, 140};
  bumped["bumps"] = {{{"support", {0.5, 0.7}}}, {{"support", {0.6, 0.8}}}, {{"support", {0.7, 0.9}}}};
  auto sweep = experiments::run_gap_sweep(bumped);
  std::vector<double> rates;
  bool fits_ok = true;
  for (size_t i = 1; i < sweep.series.size(); ++i) {
    const auto& gs = sweep.series[i];
    fits_ok = fits_ok && gs.fit.slope < 0.0 && gs.fit.r2 >= 0.98 &&
              *std::min_element(gs.gaps.begin(), gs.gaps.end()) > 0.0;
    rates.push_back(-gs.fit.slope);
  }
  bool ordered = rates.size() == 3 && rates[0] > rates[1] && rates[1] > rates[2] && rates[2] > 0.0;
  bool ok = base_max < 1e-10 && fits_ok && ordered;
  report(ok, "symmetric wells degenerate; bumps split with ordered rates",
         fmt("symmetric gap %.1e (<1e-10); split rates %.3f > %.3f > %.3f > 0 as the bump nears "
             "the well",
             base_max, rates.size() > 0 ? rates[0] : 0.0, rates.size() > 1 ? rates[1] : 0.0,
             rates.size() > 2 ? rates[2] : 0.0));
}

// ---- 10: the WKB threshold counts exactly one low-lying state ----

void criterion_count() {
  json cfg = {{"experiment", "count"},
              {"family", {{"name", "cp1-poly-n3"}, {"coeffs", {1.0, 0.3, -1.0, -0.3}}}},
              {"N", {100, 200, 300}}};
  auto res = experiments::run_count(cfg);
  bool ok = res.epsilon > 0.0;
  for (const auto& r : res.rows) ok = ok && r.count == 1;
  report(ok, "threshold set by the energy splitting counts one state",
         fmt("leading energies %.3f / %.3f, half-splitting %.3f, count = {%d, %d, %d} (want 1)",
             res.lambda0_a, res.lambda0_b, res.epsilon, res.rows[0].count, res.rows[1].count,
             res.rows[2].count));
}

}  // namespace

int main() {
  auto t0 = std::chrono::steady_clock::now();
  criterion_exact_isotropic();
  criterion_phase_equation();
  criterion_leading_energy();
  criterion_residual_decay();
  criterion_error_vs_residual();
  criterion_transport();
  criterion_symbol_algebra();
  criterion_envelope();
  criterion_gap();
  criterion_count();
  auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s (%.1f s)\n", all_passed ? "all criteria passed" : "SOME CRITERIA FAILED", dt);
  return all_passed ? 0 : 1;
}
