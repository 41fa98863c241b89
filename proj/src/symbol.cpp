#include "symbol.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace bt::symbols {

AnalyticSymbol::AnalyticSymbol(int nvars, int max_degree, int nterms)
    : terms_(static_cast<size_t>(nterms), PowerSeries(nvars, max_degree)) {
  if (nterms < 1) throw series::DimensionError("symbol needs at least one term");
}

AnalyticSymbol::AnalyticSymbol(std::vector<PowerSeries> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw series::DimensionError("symbol needs at least one term");
  for (const auto& t : terms_)
    if (t.nvars() != nvars() || t.max_degree() != max_degree())
      throw series::DimensionError("symbol terms must share variables and degree");
}

AnalyticSymbol AnalyticSymbol::operator+(const AnalyticSymbol& o) const {
  int n = std::min(nterms(), o.nterms());
  std::vector<PowerSeries> out;
  out.reserve(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) out.push_back(term(k) + o.term(k));
  return AnalyticSymbol(std::move(out));
}

AnalyticSymbol AnalyticSymbol::operator-(const AnalyticSymbol& o) const {
  return *this + o * cplx(-1.0);
}

AnalyticSymbol AnalyticSymbol::operator*(cplx s) const {
  std::vector<PowerSeries> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(t * s);
  return AnalyticSymbol(std::move(out));
}

nlohmann::json AnalyticSymbol::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : terms_) terms.push_back(t.to_json());
  return {{"terms", terms}};
}

AnalyticSymbol AnalyticSymbol::from_json(const nlohmann::json& j) {
  std::vector<PowerSeries> terms;
  for (const auto& t : j.at("terms")) terms.push_back(PowerSeries::from_json(t));
  return AnalyticSymbol(std::move(terms));
}

AnalyticSymbol cauchy_product(const AnalyticSymbol& a, const AnalyticSymbol& b) {
  int n = std::min(a.nterms(), b.nterms());
  int nv = a.nvars();
  int D = std::min(a.max_degree(), b.max_degree());
  if (a.nvars() != b.nvars()) throw series::DimensionError("variable count mismatch in product");
  AnalyticSymbol out(nv, D, n);
  for (int k = 0; k < n; ++k) {
    PowerSeries acc(nv, D);
    for (int i = 0; i <= k; ++i) acc += a.term(i) * b.term(k - i);
    out.term(k) = acc;
  }
  return out;
}

AnalyticSymbol symbol_inverse(const AnalyticSymbol& a) {
  series::MultiIndex zero(a.nvars());
  if (std::abs(a.term(0).coeff(zero)) == 0.0)
    throw series::SingularMapError("symbol_inverse: leading term vanishes at 0");
  AnalyticSymbol out(a.nvars(), a.max_degree(), a.nterms());
  PowerSeries inv0 = a.term(0).reciprocal();
  out.term(0) = inv0;
  for (int k = 1; k < a.nterms(); ++k) {
    PowerSeries acc(a.nvars(), a.max_degree());
    for (int i = 1; i <= k; ++i) acc += a.term(i) * out.term(k - i);
    out.term(k) = -(inv0 * acc);
  }
  return out;
}

int truncation_rank(int nterms, double N, double R, std::optional<double> c_override) {
  double c = c_override ? *c_override : std::exp(1.0) / (3.0 * R);
  int k = static_cast<int>(std::floor(c * N));
  return std::max(0, std::min(nterms - 1, k));
}

cplx summate(const AnalyticSymbol& a, double N, const std::vector<cplx>& point,
             double R, std::optional<double> c_override) {
  int kmax = truncation_rank(a.nterms(), N, R, c_override);
  cplx acc = 0.0;
  double w = 1.0;
  for (int k = 0; k <= kmax; ++k) {
    acc += w * a.term(k).evaluate(point);
    w /= N;
  }
  return acc;
}

EnvelopeFit fit_class_params(const std::vector<NormSample>& samples, double m, bool cover) {
  std::vector<NormSample> used;
  for (const auto& s : samples)
    if (s.value > 0.0 && std::isfinite(s.value)) used.push_back(s);
  EnvelopeFit fit;
  fit.samples = static_cast<int>(used.size());
  if (used.size() < 3) {
    fit.max_log_excess = 0.0;
    return fit;
  }
  // log v = log C + j log r + k log R + log (j+k)! - m log(j+k+1)
  Eigen::MatrixXd X(static_cast<long>(used.size()), 3);
  Eigen::VectorXd y(static_cast<long>(used.size()));
  for (size_t i = 0; i < used.size(); ++i) {
    const auto& s = used[i];
    X(static_cast<long>(i), 0) = 1.0;
    X(static_cast<long>(i), 1) = s.j;
    X(static_cast<long>(i), 2) = s.k;
    y(static_cast<long>(i)) = std::log(s.value) - std::lgamma(s.j + s.k + 1.0) +
                              m * std::log(s.j + s.k + 1.0);
  }
  Eigen::Vector3d beta = (X.transpose() * X).ldlt().solve(X.transpose() * y);
  fit.params.m = m;
  fit.params.C = std::exp(beta(0));
  fit.params.r = std::exp(beta(1));
  fit.params.R = std::exp(beta(2));
  double excess = -1e300;
  for (size_t i = 0; i < used.size(); ++i)
    excess = std::max(excess, y(static_cast<long>(i)) -
                                  (beta(0) + beta(1) * used[i].j + beta(2) * used[i].k));
  fit.max_log_excess = excess;
  if (cover && excess > 0.0) {
    fit.params.C *= std::exp(excess) * (1.0 + 1e-12);
    fit.max_log_excess = 0.0;
  }
  return fit;
}

EnvelopeFit fit_class_params(const AnalyticSymbol& a, int jmax, double m, bool cover) {
  std::vector<NormSample> samples;
  for (int k = 0; k < a.nterms(); ++k)
    for (int j = 0; j <= std::min(jmax, a.max_degree()); ++j)
      samples.push_back({j, k, a.term(k).cj_norm_at0(j)});
  return fit_class_params(samples, m, cover);
}

}  // namespace bt::symbols
