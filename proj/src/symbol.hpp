#pragma once

#include <optional>
#include <vector>

#include "series.hpp"

namespace bt::symbols {

using series::cplx;
using series::PowerSeries;

/// Growth envelope ||a_k||_{C^j} <= C r^j R^k (j+k)! / (j+k+1)^m.
struct SymbolClassParams {
  double C = 1.0;
  double r = 1.0;
  double R = 1.0;
  double m = 4.0;
};

/// Formal analytic symbol: a(N) ~ sum_k N^{-k} a_k with a_k a germ at 0.
/// All terms share variable count and truncation degree.
class AnalyticSymbol {
 public:
  AnalyticSymbol(int nvars, int max_degree, int nterms);
  explicit AnalyticSymbol(std::vector<PowerSeries> terms);

  int nvars() const { return terms_.front().nvars(); }
  int max_degree() const { return terms_.front().max_degree(); }
  int nterms() const { return static_cast<int>(terms_.size()); }
  const PowerSeries& term(int k) const { return terms_[static_cast<size_t>(k)]; }
  PowerSeries& term(int k) { return terms_[static_cast<size_t>(k)]; }

  AnalyticSymbol operator+(const AnalyticSymbol& o) const;
  AnalyticSymbol operator-(const AnalyticSymbol& o) const;
  AnalyticSymbol operator*(cplx s) const;

  nlohmann::json to_json() const;
  static AnalyticSymbol from_json(const nlohmann::json& j);

 private:
  std::vector<PowerSeries> terms_;
};

/// Cauchy product: (a * b)_k = sum_{i <= k} a_i b_{k-i}, truncated to the
/// smaller of the two term counts.
AnalyticSymbol cauchy_product(const AnalyticSymbol& a, const AnalyticSymbol& b);

/// Multiplicative inverse when a_0(0) != 0; nterms matches the input.
AnalyticSymbol symbol_inverse(const AnalyticSymbol& a);

/// Growth-aware truncation rank: k_max = min(nterms - 1, floor(c N)) with
/// c = e / (3 R) unless overridden.
int truncation_rank(int nterms, double N, double R, std::optional<double> c_override = {});

/// Numerical value sum_{k <= kmax} N^{-k} a_k(point).
cplx summate(const AnalyticSymbol& a, double N, const std::vector<cplx>& point,
             double R, std::optional<double> c_override = {});

struct EnvelopeFit {
  SymbolClassParams params;
  double max_log_excess;  // max over samples of log(value) - log(envelope), <= 0 when covering
  int samples = 0;
};

/// Least-squares fit of (C, r, R) on log ||a_k||_{C^j} against the class
/// envelope, with m fixed. When `cover` is set, C is inflated afterwards so
/// the envelope dominates every sample.
EnvelopeFit fit_class_params(const AnalyticSymbol& a, int jmax, double m, bool cover);

/// Same fit applied to an explicit table of norms: entry (j, k, value).
struct NormSample {
  int j;
  int k;
  double value;
};
EnvelopeFit fit_class_params(const std::vector<NormSample>& samples, double m, bool cover);

}  // namespace bt::symbols
