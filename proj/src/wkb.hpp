#pragma once

#include "hj.hpp"
#include "models.hpp"
#include "symbol.hpp"
#include "transport.hpp"

namespace bt::wkb {

using series::cplx;
using series::PowerSeries;

struct InsufficientDegreeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WKBOptions {
  int K = 10;           // corrections lambda_0..K, u_0..K
  int D = 0;            // series truncation degree; defaults to 2K + 4
  int check_orders = 4; // re-derive the first few order identities via the
                        // oscillatory-integral expansion as a self-check
};

/// Laplace-type expansion of the localized Toeplitz action around the
/// minimum: all data needed to expand
///   int e^{N Phi(x; s, t)} a(x; s, t) ds dt
/// in powers of 1/N by Wick contraction with the inverse phase Hessian.
struct StationaryPhase {
  int D = 0;
  PowerSeries phi3;                  // phase minus its (s,t)-quadratic jet
  std::vector<PowerSeries> phi3_pow; // cached powers of phi3
  PowerSeries g_st, g_tt;            // contraction matrix entries, in x, lifted
  PowerSeries pref;                  // (-det H)^{-1/2}, 1-variable in x
  PowerSeries x3, s3, t3;            // ring generators
  double jet_defect = 0.0;           // size of the (s,t)-linear phase jet (should vanish)

  /// All orders T_0..P of the expansion of the amplitude `a` (3 variables),
  /// as 1-variable series in x.
  std::vector<PowerSeries> expand(const PowerSeries& a, int P) const;
  PowerSeries lift_x(const PowerSeries& u1) const;       // u(x)
  PowerSeries lift_shift(const PowerSeries& u1) const;   // u(x + s)
  PowerSeries lift_germ(const PowerSeries& a2) const;    // a(y, wbar) at y = x+s, wbar = ybar_c + t
};

StationaryPhase make_stationary_phase(const models::KahlerModel& model,
                                      const hj::HJSolution& hj, int D, int max_order);

struct WKBExpansion {
  models::KahlerModel model;
  PowerSeries f_tilde;     // recentred germ (constant removed)
  double offset = 0.0;     // f at the base point
  hj::HJSolution hj;
  StationaryPhase sp;
  std::vector<double> lambda;       // lambda_0..K
  std::vector<PowerSeries> u;       // u_0..K, u_0(0) = 1, u_k(0) = 0
  PowerSeries A, B;                 // first-order transport data
  std::vector<int> trust_degree;    // coefficient degrees reliable at order k
  double lambda_imag_max = 0.0;     // reality defect of the eigenvalue series
  double order_defect = 0.0;        // max residual of the re-derived order identities
  double transport_tail_defect = 0.0;  // size of the dropped u'' couplings

  double lambda_of_N(double N, int kmax) const;  // N^{-1} sum N^{-k} lambda_k + offset
  cplx quasimode_germ(double N, int kmax, cplx y) const;
};

WKBExpansion build_wkb(const models::KahlerModel& model, const PowerSeries& f_tilde,
                       const WKBOptions& opts = {});

/// Envelope samples (C^j norms of u_k and |lambda_k|) for class-parameter fits.
std::vector<symbols::NormSample> wkb_norm_samples(const WKBExpansion& w, int jmax);

}  // namespace bt::wkb
