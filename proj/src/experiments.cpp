#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "hj.hpp"

namespace bt::experiments {

using models::KahlerModel;
using series::cplx;
using series::MultiIndex;

int thread_count() {
  const char* s = std::getenv("BTWKB_THREADS");
  if (!s) return 1;
  int v = std::atoi(s);
  return std::clamp(v, 1, 64);
}

namespace {

// Static work split: results land in caller-owned slots, so output is
// deterministic regardless of the worker count.
template <typename F>
void parallel_for(int n, const F& body) {
  int workers = std::min(thread_count(), std::max(n, 1));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) body(i);
    });
  for (auto& t : pool) t.join();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

KahlerModel model_from_spec(const json& spec, models::ModelKind kind) {
  KahlerModel m = kind == models::ModelKind::CP1 ? KahlerModel::cp1() : KahlerModel::bargmann();
  if (spec.contains("cap_offset")) m.cap_offset = spec["cap_offset"].get<int>();
  if (spec.contains("plane_s_max")) m.plane_s_max = spec["plane_s_max"].get<double>();
  return m;
}

PowerSeries cp1_n3(int D) {
  PowerSeries one = PowerSeries::constant(2, D, 1.0);
  PowerSeries xw = PowerSeries::variable(2, D, 0) * PowerSeries::variable(2, D, 1);
  return (xw - one) * (one + xw).reciprocal();
}

PowerSeries cp1_n1(int D) {
  PowerSeries one = PowerSeries::constant(2, D, 1.0);
  PowerSeries xw = PowerSeries::variable(2, D, 0) * PowerSeries::variable(2, D, 1);
  return (PowerSeries::variable(2, D, 0) + PowerSeries::variable(2, D, 1)) *
         (one + xw).reciprocal();
}

PowerSeries poly_of(const std::vector<double>& c, const PowerSeries& h) {
  PowerSeries acc = PowerSeries::constant(h.nvars(), h.max_degree(), 0.0);
  for (size_t j = c.size(); j-- > 0;) acc = acc * h + PowerSeries::constant(h.nvars(), h.max_degree(), c[j]);
  return acc;
}

double bump(double h, double lo, double hi) {
  double u = (2.0 * h - lo - hi) / (hi - lo);
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

}  // namespace

Family make_family(const json& spec) {
  Family fam;
  fam.name = spec.at("name").get<std::string>();
  const std::string& name = fam.name;

  if (name == "plane-isotropic") {
    fam.model = model_from_spec(spec, models::ModelKind::Bargmann);
    fam.chart = {[](double r, double) { return r * r; }, {0}};
    fam.germ = [](int D) {
      PowerSeries f(2, D);
      f.set_coeff(MultiIndex{1, 1}, 1.0);
      return f;
    };
    return fam;
  }

  if (name == "plane-quadratic") {
    double a = spec.at("a").get<double>();
    double b = spec.at("b").get<double>();
    double angle = spec.value("angle", 0.0);
    double c = std::cos(angle), s = std::sin(angle);
    // Q = R diag(a, b) R^T
    double Q00 = a * c * c + b * s * s;
    double Q11 = a * s * s + b * c * c;
    double Q01 = (a - b) * c * s;
    fam.model = model_from_spec(spec, models::ModelKind::Bargmann);
    fam.chart = {[Q00, Q11, Q01](double r, double th) {
                   double q = r * std::cos(th), p = r * std::sin(th);
                   return Q00 * q * q + Q11 * p * p + 2.0 * Q01 * q * p;
                 },
                 {0, 2}};
    fam.germ = [Q00, Q11, Q01](int D) {
      // f = c20 x^2 + c11 x wbar + c02 wbar^2 with x = q + i p
      PowerSeries f(2, D);
      cplx c20((Q00 - Q11) / 4.0, -Q01 / 2.0);
      f.set_coeff(MultiIndex{2, 0}, c20);
      f.set_coeff(MultiIndex{0, 2}, std::conj(c20));
      f.set_coeff(MultiIndex{1, 1}, (Q00 + Q11) / 2.0);
      return f;
    };
    return fam;
  }

  if (name == "plane-quartic") {
    double eps = spec.value("eps", 0.01);
    fam.model = model_from_spec(spec, models::ModelKind::Bargmann);
    if (eps >= 1.0 / (2.0 * fam.model.plane_s_max))
      throw std::invalid_argument("plane-quartic: eps too large, symbol loses positivity on the chart");
    fam.chart = {[eps](double r, double th) {
                   double s = r * r;
                   return s + 2.0 * eps * s * s * std::cos(4.0 * th);
                 },
                 {0, 4}};
    fam.germ = [eps](int D) {
      PowerSeries f(2, D);
      f.set_coeff(MultiIndex{1, 1}, 1.0);
      if (D >= 4) {
        f.set_coeff(MultiIndex{4, 0}, eps);
        f.set_coeff(MultiIndex{0, 4}, eps);
      }
      return f;
    };
    return fam;
  }

  if (name == "cp1-tilted-well") {
    double alpha = spec.value("alpha", 0.25);
    double beta = spec.value("beta", 0.35);
    fam.model = model_from_spec(spec, models::ModelKind::CP1);
    fam.chart = {[alpha, beta](double r, double th) {
                   double r2 = r * r, den = 1.0 + r2;
                   double n3 = (r2 - 1.0) / den;
                   double n1 = 2.0 * r * std::cos(th) / den;
                   return (1.0 + n3) * (1.0 + alpha * n1) + beta * n1 * n1;
                 },
                 {0, 1, 2}};
    fam.germ = [alpha, beta](int D) {
      PowerSeries one = PowerSeries::constant(2, D, 1.0);
      PowerSeries n3 = cp1_n3(D), n1 = cp1_n1(D);
      return (one + n3) * (one + n1 * alpha) + n1 * n1 * beta;
    };
    return fam;
  }

  if (name == "cp1-poly-n3") {
    auto coeffs = spec.at("coeffs").get<std::vector<double>>();
    fam.model = model_from_spec(spec, models::ModelKind::CP1);
    fam.chart = {[coeffs](double r, double) {
                   double r2 = r * r;
                   double h = (r2 - 1.0) / (1.0 + r2);
                   double acc = 0.0;
                   for (size_t j = coeffs.size(); j-- > 0;) acc = acc * h + coeffs[j];
                   return acc;
                 },
                 {0}};
    fam.germ = [coeffs](int D) { return poly_of(coeffs, cp1_n3(D)); };
    fam.germ_mirror = [coeffs](int D) { return poly_of(coeffs, -cp1_n3(D)); };
    return fam;
  }

  if (name == "cp1-double-well-bump") {
    auto support = spec.at("support").get<std::vector<double>>();
    if (support.size() != 2 || !(support[0] < support[1]))
      throw std::invalid_argument("cp1-double-well-bump: support must be [lo, hi]");
    double lo = support[0], hi = support[1];
    double eta = spec.value("eta", 0.05);
    fam.model = model_from_spec(spec, models::ModelKind::CP1);
    fam.chart = {[lo, hi, eta](double r, double) {
                   double r2 = r * r;
                   double h = (r2 - 1.0) / (1.0 + r2);
                   return 1.0 - h * h + eta * bump(h, lo, hi);
                 },
                 {0}};
    // The bump vanishes to infinite order at both poles, so the germs are
    // those of the unperturbed double well.
    fam.germ = [](int D) { return poly_of({1.0, 0.0, -1.0}, cp1_n3(D)); };
    fam.germ_mirror = fam.germ;
    return fam;
  }

  throw std::invalid_argument("unknown family: " + fam.name);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path.string());
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\r\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt(row[i]);
    out << "\r\n";
  }
}

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::vector<double>& x, const std::vector<std::vector<double>>& ys) {
  const double W = 640, H = 480, ml = 60, mr = 20, mt = 40, mb = 40;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (double v : x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
  for (const auto& s : ys)
    for (double v : s)
      if (std::isfinite(v)) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  auto X = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto Y = [&](double v) { return H - mb - (v - ymin) / (ymax - ymin) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
      << "</text>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
      << H - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << ml << "\" y=\"" << H - mb + 16 << "\" font-size=\"11\">" << fmt(xmin)
      << "</text>\n<text x=\"" << W - mr << "\" y=\"" << H - mb + 16
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(xmax) << "</text>\n";
  out << "<text x=\"" << ml - 4 << "\" y=\"" << H - mb << "\" text-anchor=\"end\" font-size=\"11\">"
      << fmt(ymin) << "</text>\n<text x=\"" << ml - 4 << "\" y=\"" << mt
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(ymax) << "</text>\n";
  for (size_t s = 0; s < ys.size(); ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << colors[s % 5] << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < x.size() && i < ys[s].size(); ++i) {
      if (!std::isfinite(ys[s][i])) continue;
      out << X(x[i]) << "," << Y(ys[s][i]) << " ";
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

ResidualSweep run_residual_sweep(const json& cfg) {
  Family fam = make_family(cfg.at("family"));
  int K = cfg.value("K", 10);
  wkb::WKBOptions opts;
  opts.K = K;
  opts.D = cfg.value("D", 0);
  auto Ns = cfg.at("N").get<std::vector<int>>();
  auto w = wkb::build_wkb(fam.model, fam.germ(opts.D > 0 ? opts.D : 2 * K + 4), opts);

  ResidualSweep out;
  out.lambda0 = w.lambda[0];
  out.order_defect = w.order_defect;
  auto hr = hj::hj_residual(w.f_tilde, fam.model.polarized_potential(w.f_tilde.max_degree() + 1), w.hj);
  out.hj_eikonal = hr.eikonal;
  out.envelope = symbols::fit_class_params(wkb::wkb_norm_samples(w, 10), 4.0, true);

  int fixed_kmax = cfg.value("kmax", -1);
  out.rows.resize(Ns.size());
  parallel_for(static_cast<int>(Ns.size()), [&](int i) {
    int N = Ns[static_cast<size_t>(i)];
    ResidualRow row;
    row.N = N;
    row.kmax = fixed_kmax >= 0
                   ? std::min(fixed_kmax, K)
                   : symbols::truncation_rank(K + 1, N, out.envelope.params.R);
    row.lambda_N = w.lambda_of_N(N, row.kmax);
    auto T = quant::build_toeplitz(fam.model, fam.chart, N);
    row.min_eig = quant::eigenvalues(T).front();
    row.diff = std::abs(row.min_eig - row.lambda_N);
    double r_disk = cfg.value("disk_radius", std::min(0.45, std::sqrt(80.0 / N)));
    auto state = quant::embed_state(
        fam.model, N, [&](cplx y) { return w.quasimode_germ(N, row.kmax, y); }, r_disk);
    row.residual = quant::relative_residual(T, state.v, row.lambda_N);
    row.tail_basis = state.tail_basis;
    row.tail_radial = state.tail_radial;
    out.rows[static_cast<size_t>(i)] = row;
  });

  std::vector<double> xs, lr, ld;
  for (const auto& r : out.rows) {
    xs.push_back(r.N);
    lr.push_back(std::log(std::max(r.residual, 1e-300)));
    ld.push_back(std::log(std::max(r.diff, 1e-300)));
  }
  if (xs.size() >= 2) {
    out.residual_fit = fit::fit_line(xs, lr);
    out.diff_fit = fit::fit_line(xs, ld);
  }
  return out;
}

GapSweep run_gap_sweep(const json& cfg) {
  json base_spec = cfg.at("family");
  GapSweep out;
  out.Ns = cfg.at("N").get<std::vector<int>>();

  std::vector<json> specs;
  std::vector<std::string> labels;
  specs.push_back(base_spec);
  labels.push_back("baseline");
  if (cfg.contains("bumps")) {
    for (const auto& b : cfg["bumps"]) {
      json s;
      s["name"] = "cp1-double-well-bump";
      s["support"] = b.at("support");
      if (b.contains("eta")) s["eta"] = b["eta"];
      specs.push_back(s);
      auto sup = b.at("support").get<std::vector<double>>();
      char lbl[64];
      std::snprintf(lbl, sizeof lbl, "bump[%g,%g]", sup.at(0), sup.at(1));
      labels.push_back(lbl);
    }
  }

  out.series.resize(specs.size());
  for (size_t s = 0; s < specs.size(); ++s) {
    Family fam = make_family(specs[s]);
    GapSeries& gs = out.series[s];
    gs.label = labels[s];
    gs.gaps.resize(out.Ns.size());
    parallel_for(static_cast<int>(out.Ns.size()), [&](int i) {
      auto T = quant::build_toeplitz(fam.model, fam.chart, out.Ns[static_cast<size_t>(i)]);
      auto ev = quant::eigenvalues(T);
      gs.gaps[static_cast<size_t>(i)] = ev[1] - ev[0];
    });
    bool positive = std::all_of(gs.gaps.begin(), gs.gaps.end(), [](double g) { return g > 0.0; });
    if (positive && out.Ns.size() >= 2) {
      std::vector<double> xs(out.Ns.begin(), out.Ns.end()), ys;
      for (double g : gs.gaps) ys.push_back(std::log(g));
      gs.fit = fit::fit_line(xs, ys);
    }
  }
  return out;
}

CountResult run_count(const json& cfg) {
  Family fam = make_family(cfg.at("family"));
  if (!fam.germ_mirror) throw std::invalid_argument("count: family has a single well");
  int K = cfg.value("K", 2);
  wkb::WKBOptions opts;
  opts.K = K;
  opts.check_orders = std::min(2, K);
  int D = cfg.value("D", 2 * K + 4);
  auto wa = wkb::build_wkb(fam.model, fam.germ(D), opts);
  auto wb = wkb::build_wkb(fam.model, fam.germ_mirror(D), opts);

  CountResult out;
  out.lambda0_a = wa.lambda[0];
  out.lambda0_b = wb.lambda[0];
  out.epsilon = cfg.value("epsilon", std::abs(out.lambda0_a - out.lambda0_b) / 2.0);
  double floor_level = std::min(out.lambda0_a, out.lambda0_b);
  double offset = wa.offset;  // symbol value at the wells (equal by construction)

  auto Ns = cfg.at("N").get<std::vector<int>>();
  out.rows.resize(Ns.size());
  parallel_for(static_cast<int>(Ns.size()), [&](int i) {
    int N = Ns[static_cast<size_t>(i)];
    CountRow row;
    row.N = N;
    row.threshold = offset + (floor_level + out.epsilon) / N;
    auto ev = quant::eigenvalues(quant::build_toeplitz(fam.model, fam.chart, N));
    row.count = static_cast<int>(std::count_if(ev.begin(), ev.end(),
                                               [&](double e) { return e <= row.threshold; }));
    out.rows[static_cast<size_t>(i)] = row;
  });
  return out;
}

namespace {

json envelope_json(const symbols::EnvelopeFit& e) {
  return {{"C", e.params.C}, {"r", e.params.r},        {"R", e.params.R},
          {"m", e.params.m}, {"max_log_excess", e.max_log_excess}, {"samples", e.samples}};
}

json fit_json(const fit::LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
}

json report_skeleton(const json& cfg) {
  json rep;
  rep["config"] = cfg;
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016zx", std::hash<std::string>{}(cfg.dump()));
  rep["config_hash"] = hash;
  return rep;
}

json run_wkb_report(const json& cfg, const std::filesystem::path& dir) {
  Family fam = make_family(cfg.at("family"));
  wkb::WKBOptions opts;
  opts.K = cfg.value("K", 10);
  opts.D = cfg.value("D", 0);
  auto w = wkb::build_wkb(fam.model, fam.germ(opts.D > 0 ? opts.D : 2 * opts.K + 4), opts);
  auto hr = hj::hj_residual(w.f_tilde, fam.model.polarized_potential(w.f_tilde.max_degree() + 1), w.hj);

  json rep = report_skeleton(cfg);
  rep["lambda"] = w.lambda;
  rep["offset"] = w.offset;
  rep["phase_slope"] = {w.hj.slope.real(), w.hj.slope.imag()};
  rep["hj_residual"] = {{"eikonal", hr.eikonal}, {"transport", hr.transport}};
  rep["admissibility_margin_0.4"] = hj::admissibility_margin(w.hj.phi, 0.4);
  rep["defects"] = {{"jet", w.sp.jet_defect},
                    {"order", w.order_defect},
                    {"transport_tail", w.transport_tail_defect},
                    {"lambda_imag", w.lambda_imag_max}};
  rep["envelope"] = envelope_json(symbols::fit_class_params(wkb::wkb_norm_samples(w, 10), 4.0, true));
  if (cfg.contains("N")) {
    json tab = json::array();
    for (int N : cfg["N"].get<std::vector<int>>())
      tab.push_back({{"N", N}, {"lambda_N", w.lambda_of_N(N, opts.K)}});
    rep["lambda_of_N"] = tab;
  }

  std::vector<std::vector<double>> rows;
  for (size_t k = 0; k < w.lambda.size(); ++k)
    rows.push_back({static_cast<double>(k), w.lambda[k]});
  write_csv(dir / "lambda.csv", {"k", "lambda_k"}, rows);

  json series;
  series["phi"] = w.hj.phi.to_json();
  series["F"] = w.hj.F.to_json();
  json uj = json::array();
  for (const auto& uk : w.u) uj.push_back(uk.to_json());
  series["u"] = uj;
  std::ofstream(dir / "expansion.json") << series.dump(2) << "\n";
  return rep;
}

json run_spectrum_report(const json& cfg, const std::filesystem::path& dir) {
  Family fam = make_family(cfg.at("family"));
  int N = cfg.at("N").get<int>();
  auto ev = quant::eigenvalues(quant::build_toeplitz(fam.model, fam.chart, N));
  int limit = cfg.value("limit", static_cast<int>(ev.size()));
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < limit && i < static_cast<int>(ev.size()); ++i)
    rows.push_back({static_cast<double>(i), ev[static_cast<size_t>(i)]});
  write_csv(dir / "spectrum.csv", {"index", "eigenvalue"}, rows);
  json rep = report_skeleton(cfg);
  rep["N"] = N;
  rep["dim"] = ev.size();
  rep["min"] = ev.front();
  rep["max"] = ev.back();
  return rep;
}

json run_residual_report(const json& cfg, const std::filesystem::path& dir) {
  auto sweep = run_residual_sweep(cfg);
  std::vector<std::vector<double>> rows;
  std::vector<double> xs, lres, ldiff;
  for (const auto& r : sweep.rows) {
    rows.push_back({static_cast<double>(r.N), static_cast<double>(r.kmax), r.lambda_N, r.min_eig,
                    r.diff, r.residual, r.tail_basis, r.tail_radial});
    xs.push_back(r.N);
    lres.push_back(std::log10(std::max(r.residual, 1e-300)));
    ldiff.push_back(std::log10(std::max(r.diff, 1e-300)));
  }
  write_csv(dir / "residuals.csv",
            {"N", "kmax", "lambda_N", "min_eig", "diff", "residual", "tail_basis", "tail_radial"},
            rows);
  write_svg_plot(dir / "residuals.svg", "log10 residual (blue) and eigenvalue gap (red) vs N", xs,
                 {lres, ldiff});
  json rep = report_skeleton(cfg);
  rep["lambda0"] = sweep.lambda0;
  rep["hj_eikonal"] = sweep.hj_eikonal;
  rep["order_defect"] = sweep.order_defect;
  rep["residual_fit"] = fit_json(sweep.residual_fit);
  rep["diff_fit"] = fit_json(sweep.diff_fit);
  rep["envelope"] = envelope_json(sweep.envelope);
  return rep;
}

json run_gap_report(const json& cfg, const std::filesystem::path& dir) {
  auto sweep = run_gap_sweep(cfg);
  std::vector<std::string> header = {"N"};
  for (const auto& s : sweep.series) header.push_back(s.label);
  std::vector<std::vector<double>> rows;
  std::vector<double> xs;
  std::vector<std::vector<double>> curves(sweep.series.size());
  for (size_t i = 0; i < sweep.Ns.size(); ++i) {
    std::vector<double> row = {static_cast<double>(sweep.Ns[i])};
    xs.push_back(sweep.Ns[i]);
    for (size_t s = 0; s < sweep.series.size(); ++s) {
      double g = sweep.series[s].gaps[i];
      row.push_back(g);
      curves[s].push_back(std::log10(std::max(g, 1e-18)));
    }
    rows.push_back(row);
  }
  write_csv(dir / "gaps.csv", header, rows);
  write_svg_plot(dir / "gaps.svg", "log10 spectral gap vs N", xs, curves);
  json rep = report_skeleton(cfg);
  json fits = json::array();
  for (const auto& s : sweep.series)
    fits.push_back({{"label", s.label},
                    {"max_gap", *std::max_element(s.gaps.begin(), s.gaps.end())},
                    {"fit", fit_json(s.fit)}});
  rep["series"] = fits;
  return rep;
}

json run_count_report(const json& cfg, const std::filesystem::path& dir) {
  auto res = run_count(cfg);
  std::vector<std::vector<double>> rows;
  for (const auto& r : res.rows)
    rows.push_back({static_cast<double>(r.N), r.threshold, static_cast<double>(r.count)});
  write_csv(dir / "counts.csv", {"N", "threshold", "count"}, rows);
  json rep = report_skeleton(cfg);
  rep["lambda0_a"] = res.lambda0_a;
  rep["lambda0_b"] = res.lambda0_b;
  rep["epsilon"] = res.epsilon;
  json counts = json::array();
  for (const auto& r : res.rows)
    counts.push_back({{"N", r.N}, {"threshold", r.threshold}, {"count", r.count}});
  rep["rows"] = counts;
  return rep;
}

json run_profile_report(const json& cfg, const std::filesystem::path& dir) {
  Family fam = make_family(cfg.at("family"));
  int N = cfg.at("N").get<int>();
  wkb::WKBOptions opts;
  opts.K = cfg.value("K", 6);
  opts.D = cfg.value("D", 0);
  auto w = wkb::build_wkb(fam.model, fam.germ(opts.D > 0 ? opts.D : 2 * opts.K + 4), opts);
  int kmax = cfg.value("kmax", opts.K);
  double r_disk = cfg.value("disk_radius", std::min(0.45, std::sqrt(80.0 / N)));
  auto state = quant::embed_state(
      fam.model, N, [&](cplx y) { return w.quasimode_germ(N, kmax, y); }, r_disk);

  std::vector<std::vector<double>> crows;
  for (int k = 0; k < state.v.size(); ++k)
    crows.push_back({static_cast<double>(k), std::abs(state.v(k))});
  write_csv(dir / "coefficients.csv", {"k", "abs_vk"}, crows);

  // Pointwise decay of the weighted quasimode against the leading Gaussian.
  int nr = cfg.value("profile_points", 64);
  double slope = std::abs(w.hj.slope);
  std::vector<std::vector<double>> prows;
  std::vector<double> xs, mod, ref;
  for (int i = 1; i <= nr; ++i) {
    double r = r_disk * i / nr;
    double best = -1e300;
    for (int j = 0; j < 64; ++j) {
      double th = 2.0 * M_PI * j / 64.0;
      cplx y = std::polar(r, th);
      double v = std::log10(std::abs(w.quasimode_germ(N, kmax, y))) -
                 N * fam.model.potential(r * r) / std::log(10.0);
      best = std::max(best, v);
    }
    double gauss = -N * (1.0 - slope) * r * r / 2.0 / std::log(10.0);
    prows.push_back({r, best, gauss});
    xs.push_back(r);
    mod.push_back(best);
    ref.push_back(gauss);
  }
  write_csv(dir / "profile.csv", {"r", "log10_weighted_modulus", "log10_gaussian_bound"}, prows);
  write_svg_plot(dir / "profile.svg", "log10 weighted quasimode modulus vs r", xs, {mod, ref});

  json rep = report_skeleton(cfg);
  rep["N"] = N;
  rep["kmax"] = kmax;
  rep["norm"] = state.norm;
  rep["tail_basis"] = state.tail_basis;
  rep["tail_radial"] = state.tail_radial;
  return rep;
}

}  // namespace

json run_experiment(const json& cfg, const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  std::string kind = cfg.at("experiment").get<std::string>();
  json rep;
  if (kind == "wkb")
    rep = run_wkb_report(cfg, dir);
  else if (kind == "spectrum")
    rep = run_spectrum_report(cfg, dir);
  else if (kind == "residual-sweep")
    rep = run_residual_report(cfg, dir);
  else if (kind == "gap-sweep")
    rep = run_gap_report(cfg, dir);
  else if (kind == "count")
    rep = run_count_report(cfg, dir);
  else if (kind == "profile")
    rep = run_profile_report(cfg, dir);
  else
    throw std::invalid_argument("unknown experiment: " + kind);
  rep["experiment"] = kind;
  std::ofstream(dir / "report.json") << rep.dump(2) << "\n";
  return rep;
}

}  // namespace bt::experiments
