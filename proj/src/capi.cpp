#include "btwkb.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include "experiments.hpp"
#include "hj.hpp"
#include "transport.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

btw_status fail(btw_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename F>
btw_status guarded(const F& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const json::exception& e) {
    return fail(BTW_EINVAL, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(BTW_EINVAL, e.what());
  } catch (const bt::hj::DegenerateMinimumError& e) {
    return fail(BTW_EMATH, e.what());
  } catch (const bt::transport::ResonanceError& e) {
    return fail(BTW_EMATH, e.what());
  } catch (const bt::wkb::InsufficientDegreeError& e) {
    return fail(BTW_EMATH, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(BTW_EIO, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(BTW_EIO, e.what());
  } catch (const std::exception& e) {
    return fail(BTW_EINTERNAL, e.what());
  }
}

}  // namespace

struct btw_wkb {
  bt::wkb::WKBExpansion w;
};

extern "C" {

const char* btw_version(void) { return "0.1.0"; }

const char* btw_last_error(void) { return g_last_error.c_str(); }

void btw_free_string(char* s) { std::free(s); }
void btw_free_doubles(double* p) { std::free(p); }

btw_status btw_wkb_build(const char* config_json, btw_wkb** out) {
  if (!config_json || !out) return fail(BTW_EINVAL, "null argument");
  *out = nullptr;
  return guarded([&] {
    json cfg = json::parse(config_json);
    auto fam = bt::experiments::make_family(cfg.at("family"));
    bt::wkb::WKBOptions opts;
    opts.K = cfg.value("K", 10);
    opts.D = cfg.value("D", 0);
    int D = opts.D > 0 ? opts.D : 2 * opts.K + 4;
    *out = new btw_wkb{bt::wkb::build_wkb(fam.model, fam.germ(D), opts)};
    return BTW_OK;
  });
}

void btw_wkb_free(btw_wkb* w) { delete w; }

btw_status btw_wkb_lambda(const btw_wkb* w, int k, double* out) {
  if (!w || !out) return fail(BTW_EINVAL, "null argument");
  if (k < 0 || k >= static_cast<int>(w->w.lambda.size()))
    return fail(BTW_EINVAL, "lambda index out of range");
  *out = w->w.lambda[static_cast<size_t>(k)];
  return BTW_OK;
}

btw_status btw_wkb_lambda_at(const btw_wkb* w, double N, int kmax, double* out) {
  if (!w || !out) return fail(BTW_EINVAL, "null argument");
  if (N <= 0.0 || kmax < 0) return fail(BTW_EINVAL, "need N > 0 and kmax >= 0");
  *out = w->w.lambda_of_N(N, kmax);
  return BTW_OK;
}

btw_status btw_wkb_report_json(const btw_wkb* w, char** out) {
  if (!w || !out) return fail(BTW_EINVAL, "null argument");
  return guarded([&] {
    auto env = bt::symbols::fit_class_params(bt::wkb::wkb_norm_samples(w->w, 10), 4.0, true);
    json rep;
    rep["lambda"] = w->w.lambda;
    rep["offset"] = w->w.offset;
    rep["phase_slope"] = {w->w.hj.slope.real(), w->w.hj.slope.imag()};
    rep["defects"] = {{"jet", w->w.sp.jet_defect},
                      {"order", w->w.order_defect},
                      {"transport_tail", w->w.transport_tail_defect},
                      {"lambda_imag", w->w.lambda_imag_max}};
    rep["envelope"] = {{"C", env.params.C}, {"r", env.params.r}, {"R", env.params.R},
                       {"m", env.params.m}, {"samples", env.samples}};
    *out = dup_string(rep.dump(2));
    return *out ? BTW_OK : fail(BTW_EINTERNAL, "allocation failed");
  });
}

btw_status btw_spectrum(const char* config_json, int N, double** eigs, int* len) {
  if (!config_json || !eigs || !len) return fail(BTW_EINVAL, "null argument");
  *eigs = nullptr;
  *len = 0;
  if (N < 1) return fail(BTW_EINVAL, "need N >= 1");
  return guarded([&] {
    json cfg = json::parse(config_json);
    auto fam = bt::experiments::make_family(cfg.at("family"));
    auto ev = bt::quant::eigenvalues(bt::quant::build_toeplitz(fam.model, fam.chart, N));
    auto* p = static_cast<double*>(std::malloc(ev.size() * sizeof(double)));
    if (!p) return fail(BTW_EINTERNAL, "allocation failed");
    std::memcpy(p, ev.data(), ev.size() * sizeof(double));
    *eigs = p;
    *len = static_cast<int>(ev.size());
    return BTW_OK;
  });
}

btw_status btw_quasimode_residual(const char* config_json, int N, double* residual,
                                  double* lambda_N, double* min_eig) {
  if (!config_json) return fail(BTW_EINVAL, "null argument");
  if (N < 1) return fail(BTW_EINVAL, "need N >= 1");
  return guarded([&] {
    json cfg = json::parse(config_json);
    cfg["N"] = json::array({N});
    auto sweep = bt::experiments::run_residual_sweep(cfg);
    const auto& row = sweep.rows.front();
    if (residual) *residual = row.residual;
    if (lambda_N) *lambda_N = row.lambda_N;
    if (min_eig) *min_eig = row.min_eig;
    return BTW_OK;
  });
}

btw_status btw_experiment_run(const char* config_json, const char* out_dir, char** report_json) {
  if (!config_json || !out_dir) return fail(BTW_EINVAL, "null argument");
  if (report_json) *report_json = nullptr;
  return guarded([&] {
    json rep = bt::experiments::run_experiment(json::parse(config_json), out_dir);
    if (report_json) {
      *report_json = dup_string(rep.dump(2));
      if (!*report_json) return fail(BTW_EINTERNAL, "allocation failed");
    }
    return BTW_OK;
  });
}

}  // extern "C"
