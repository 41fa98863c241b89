#include "series.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <Eigen/Dense>

namespace bt::series {

MultiIndex::MultiIndex(std::initializer_list<int> xs) {
  if (xs.size() == 0 || xs.size() > kMaxVars)
    throw DimensionError("multi-index needs 1..4 entries");
  nvars = static_cast<int>(xs.size());
  int i = 0;
  for (int v : xs) set(i++, v);
}

int MultiIndex::order() const {
  int s = 0;
  for (int i = 0; i < nvars; ++i) s += e[static_cast<size_t>(i)];
  return s;
}

void MultiIndex::set(int i, int v) {
  if (v < 0 || v > 255) throw DimensionError("multi-index entry out of range");
  e[static_cast<size_t>(i)] = static_cast<std::uint8_t>(v);
}

std::uint32_t MultiIndex::key() const {
  return static_cast<std::uint32_t>(e[0]) | (static_cast<std::uint32_t>(e[1]) << 8) |
         (static_cast<std::uint32_t>(e[2]) << 16) | (static_cast<std::uint32_t>(e[3]) << 24);
}

namespace {

void enumerate_degree(int nvars, int degree, MultiIndex& scratch, int var, int remaining,
                      std::vector<MultiIndex>& out) {
  if (var == nvars - 1) {
    scratch.set(var, remaining);
    out.push_back(scratch);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    scratch.set(var, v);
    enumerate_degree(nvars, degree, scratch, var + 1, remaining - v, out);
  }
}

std::mutex g_layout_mutex;
std::unordered_map<std::uint64_t, std::shared_ptr<const Layout>> g_layout_cache;

}  // namespace

Layout::Layout(int nvars, int max_degree) : nvars_(nvars), max_degree_(max_degree) {
  if (nvars < 1 || nvars > MultiIndex::kMaxVars)
    throw DimensionError("layout supports 1..4 variables");
  if (max_degree < 0 || max_degree > 200) throw DimensionError("max_degree out of range");
  degree_begin_.push_back(0);
  MultiIndex scratch(nvars);
  for (int d = 0; d <= max_degree; ++d) {
    enumerate_degree(nvars, d, scratch, 0, d, indices_);
    degree_begin_.push_back(static_cast<int>(indices_.size()));
  }
  pos_.reserve(indices_.size() * 2);
  for (int p = 0; p < static_cast<int>(indices_.size()); ++p)
    pos_.emplace(indices_[static_cast<size_t>(p)].key(), p);
}

std::shared_ptr<const Layout> Layout::get(int nvars, int max_degree) {
  std::uint64_t k = (static_cast<std::uint64_t>(nvars) << 32) |
                    static_cast<std::uint64_t>(max_degree);
  std::lock_guard<std::mutex> lock(g_layout_mutex);
  auto it = g_layout_cache.find(k);
  if (it != g_layout_cache.end()) return it->second;
  auto lay = std::shared_ptr<const Layout>(new Layout(nvars, max_degree));
  g_layout_cache.emplace(k, lay);
  return lay;
}

int Layout::position(const MultiIndex& m) const {
  auto it = pos_.find(m.key());
  return it == pos_.end() ? -1 : it->second;
}

PowerSeries::PowerSeries(int nvars, int max_degree)
    : layout_(Layout::get(nvars, max_degree)),
      coeffs_(static_cast<size_t>(layout_->size()), cplx(0.0, 0.0)) {}

PowerSeries PowerSeries::constant(int nvars, int max_degree, cplx value) {
  PowerSeries f(nvars, max_degree);
  f.coeffs_[0] = value;
  return f;
}

PowerSeries PowerSeries::variable(int nvars, int max_degree, int var) {
  MultiIndex m(nvars);
  m.set(var, 1);
  return monomial(nvars, max_degree, m, 1.0);
}

PowerSeries PowerSeries::monomial(int nvars, int max_degree, const MultiIndex& m, cplx value) {
  PowerSeries f(nvars, max_degree);
  f.set_coeff(m, value);
  return f;
}

cplx PowerSeries::coeff(const MultiIndex& m) const {
  if (m.nvars != nvars()) throw DimensionError("multi-index variable count mismatch");
  int p = layout_->position(m);
  return p < 0 ? cplx(0.0) : coeffs_[static_cast<size_t>(p)];
}

void PowerSeries::set_coeff(const MultiIndex& m, cplx v) {
  if (m.nvars != nvars()) throw DimensionError("multi-index variable count mismatch");
  int p = layout_->position(m);
  if (p < 0) throw DimensionError("multi-index order exceeds truncation degree");
  coeffs_[static_cast<size_t>(p)] = v;
}

PowerSeries PowerSeries::truncated(int new_max_degree) const {
  if (new_max_degree >= max_degree()) return *this;
  PowerSeries out(nvars(), new_max_degree);
  std::copy(coeffs_.begin(), coeffs_.begin() + out.layout_->size(), out.coeffs_.begin());
  return out;
}

PowerSeries PowerSeries::extended(int new_max_degree) const {
  if (new_max_degree <= max_degree()) return truncated(new_max_degree);
  PowerSeries out(nvars(), new_max_degree);
  std::copy(coeffs_.begin(), coeffs_.end(), out.coeffs_.begin());
  return out;
}

PowerSeries PowerSeries::operator-() const {
  PowerSeries out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

PowerSeries PowerSeries::operator+(const PowerSeries& o) const {
  if (nvars() != o.nvars()) throw DimensionError("variable count mismatch in +");
  const PowerSeries& lo = max_degree() <= o.max_degree() ? *this : o;
  const PowerSeries& hi = max_degree() <= o.max_degree() ? o : *this;
  PowerSeries out = lo;
  for (size_t i = 0; i < out.coeffs_.size(); ++i) out.coeffs_[i] += hi.coeffs_[i];
  return out;
}

PowerSeries PowerSeries::operator-(const PowerSeries& o) const { return *this + (-o); }

PowerSeries PowerSeries::operator*(cplx s) const {
  PowerSeries out = *this;
  for (auto& c : out.coeffs_) c *= s;
  return out;
}

PowerSeries PowerSeries::operator*(const PowerSeries& o) const {
  if (nvars() != o.nvars()) throw DimensionError("variable count mismatch in *");
  int D = std::min(max_degree(), o.max_degree());
  PowerSeries out(nvars(), D);
  const Layout& lay = *out.layout_;
  // Skip zero coefficients; factors are often sparse (single-variable lifts).
  for (int pa = 0; pa < layout_->size(); ++pa) {
    cplx ca = coeffs_[static_cast<size_t>(pa)];
    if (ca == cplx(0.0)) continue;
    const MultiIndex& ma = layout_->index(pa);
    int da = ma.order();
    if (da > D) break;
    int bmax = o.layout_->degree_end(std::min(D - da, o.max_degree()));
    for (int pb = 0; pb < bmax; ++pb) {
      cplx cb = o.coeffs_[static_cast<size_t>(pb)];
      if (cb == cplx(0.0)) continue;
      const MultiIndex& mb = o.layout_->index(pb);
      MultiIndex ms(nvars());
      for (int i = 0; i < nvars(); ++i) ms.set(i, ma[i] + mb[i]);
      out.coeffs_[static_cast<size_t>(lay.position(ms))] += ca * cb;
    }
  }
  return out;
}

PowerSeries PowerSeries::differentiate(int var) const {
  if (var < 0 || var >= nvars()) throw DimensionError("bad variable in differentiate");
  int D = std::max(max_degree() - 1, 0);
  PowerSeries out(nvars(), D);
  for (int p = 0; p < layout_->size(); ++p) {
    const MultiIndex& m = layout_->index(p);
    int ev = m[var];
    if (ev == 0) continue;
    MultiIndex md = m;
    md.set(var, ev - 1);
    if (md.order() > D) continue;
    out.coeffs_[static_cast<size_t>(out.layout_->position(md))] +=
        coeffs_[static_cast<size_t>(p)] * static_cast<double>(ev);
  }
  return out;
}

PowerSeries PowerSeries::compose(const std::vector<PowerSeries>& g) const {
  if (static_cast<int>(g.size()) != nvars())
    throw CompositionError("compose needs one inner series per variable");
  int D = g.front().max_degree();
  int gn = g.front().nvars();
  for (const auto& gi : g) {
    if (gi.nvars() != gn || gi.max_degree() != D)
      throw CompositionError("inner series must share variables and degree");
    MultiIndex zero(gn);
    if (gi.coeff(zero) != cplx(0.0))
      throw CompositionError("inner series must vanish at the origin");
  }
  // Precompute powers g_i^e for e up to the useful order in each variable.
  std::vector<std::vector<PowerSeries>> pw(static_cast<size_t>(nvars()));
  for (int i = 0; i < nvars(); ++i) {
    pw[static_cast<size_t>(i)].push_back(PowerSeries::constant(gn, D, 1.0));
    pw[static_cast<size_t>(i)].push_back(g[static_cast<size_t>(i)]);
  }
  PowerSeries out(gn, D);
  for (int p = 0; p < layout_->size(); ++p) {
    cplx c = coeffs_[static_cast<size_t>(p)];
    if (c == cplx(0.0)) continue;
    const MultiIndex& m = layout_->index(p);
    if (m.order() > D) break;  // g_i vanish at 0, so order-|m| terms start at degree |m|
    PowerSeries term = PowerSeries::constant(gn, D, c);
    for (int i = 0; i < nvars(); ++i) {
      auto& pws = pw[static_cast<size_t>(i)];
      while (static_cast<int>(pws.size()) <= m[i]) pws.push_back(pws.back() * pws[1]);
      if (m[i] > 0) term = term * pws[static_cast<size_t>(m[i])];
    }
    out += term;
  }
  return out;
}

PowerSeries PowerSeries::reciprocal() const {
  cplx c0 = coeffs_[0];
  if (std::abs(c0) == 0.0) throw SingularMapError("reciprocal of a series vanishing at 0");
  PowerSeries u = *this * (1.0 / c0);
  u.coeffs_[0] = 0.0;  // u = f/f(0) - 1
  PowerSeries out = PowerSeries::constant(nvars(), max_degree(), 1.0);
  PowerSeries upow = PowerSeries::constant(nvars(), max_degree(), 1.0);
  for (int k = 1; k <= max_degree(); ++k) {
    upow = upow * u;
    out = (k % 2 == 1) ? out - upow : out + upow;
  }
  return out * (1.0 / c0);
}

PowerSeries PowerSeries::pow_fractional(double alpha) const {
  if (std::abs(coeffs_[0] - cplx(1.0)) > 1e-14)
    throw SingularMapError("pow_fractional requires f(0) = 1");
  PowerSeries u = *this;
  u.coeffs_[0] = 0.0;
  PowerSeries out = PowerSeries::constant(nvars(), max_degree(), 1.0);
  PowerSeries upow = PowerSeries::constant(nvars(), max_degree(), 1.0);
  double binom = 1.0;
  for (int k = 1; k <= max_degree(); ++k) {
    binom *= (alpha - static_cast<double>(k - 1)) / static_cast<double>(k);
    upow = upow * u;
    out += upow * binom;
  }
  return out;
}

cplx PowerSeries::evaluate(const std::vector<cplx>& point) const {
  if (static_cast<int>(point.size()) != nvars())
    throw DimensionError("evaluate point dimension mismatch");
  std::vector<std::vector<cplx>> pw(static_cast<size_t>(nvars()));
  for (int i = 0; i < nvars(); ++i) {
    pw[static_cast<size_t>(i)].resize(static_cast<size_t>(max_degree()) + 1);
    pw[static_cast<size_t>(i)][0] = 1.0;
    for (int e = 1; e <= max_degree(); ++e)
      pw[static_cast<size_t>(i)][static_cast<size_t>(e)] =
          pw[static_cast<size_t>(i)][static_cast<size_t>(e - 1)] * point[static_cast<size_t>(i)];
  }
  cplx acc = 0.0;
  for (int p = 0; p < layout_->size(); ++p) {
    cplx c = coeffs_[static_cast<size_t>(p)];
    if (c == cplx(0.0)) continue;
    const MultiIndex& m = layout_->index(p);
    cplx mono = 1.0;
    for (int i = 0; i < nvars(); ++i) mono *= pw[static_cast<size_t>(i)][static_cast<size_t>(m[i])];
    acc += c * mono;
  }
  return acc;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double PowerSeries::cj_norm_at0(int j) const {
  if (j < 0 || j > max_degree()) throw DimensionError("cj_norm degree out of range");
  double s = 0.0;
  for (int p = layout_->degree_begin(j); p < layout_->degree_end(j); ++p) {
    const MultiIndex& m = layout_->index(p);
    double fact = 1.0;
    for (int i = 0; i < nvars(); ++i) fact *= factorial(m[i]);
    s += std::abs(coeffs_[static_cast<size_t>(p)]) * fact;
  }
  return s;
}

double PowerSeries::max_abs_coeff() const { return max_abs_coeff_from(0); }

double PowerSeries::max_abs_coeff_from(int from_degree) const {
  double m = 0.0;
  int start = from_degree <= max_degree() ? layout_->degree_begin(from_degree) : layout_->size();
  for (int p = start; p < layout_->size(); ++p)
    m = std::max(m, std::abs(coeffs_[static_cast<size_t>(p)]));
  return m;
}

bool PowerSeries::is_zero(double tol) const { return max_abs_coeff() <= tol; }

double PowerSeries::hermitian_defect() const {
  if (nvars() != 2) throw DimensionError("hermitian_defect needs a 2-variable germ");
  double worst = 0.0;
  for (int p = 0; p < layout_->size(); ++p) {
    const MultiIndex& m = layout_->index(p);
    MultiIndex mt{m[1], m[0]};
    int q = layout_->position(mt);
    if (q < 0) continue;
    worst = std::max(worst, std::abs(coeffs_[static_cast<size_t>(p)] -
                                     std::conj(coeffs_[static_cast<size_t>(q)])));
  }
  return worst;
}

nlohmann::json PowerSeries::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (int p = 0; p < layout_->size(); ++p) {
    cplx c = coeffs_[static_cast<size_t>(p)];
    if (c == cplx(0.0)) continue;
    const MultiIndex& m = layout_->index(p);
    nlohmann::json exps = nlohmann::json::array();
    for (int i = 0; i < nvars(); ++i) exps.push_back(m[i]);
    terms.push_back({{"exp", exps}, {"re", c.real()}, {"im", c.imag()}});
  }
  return {{"nvars", nvars()}, {"max_degree", max_degree()}, {"terms", terms}};
}

PowerSeries PowerSeries::from_json(const nlohmann::json& j) {
  PowerSeries f(j.at("nvars").get<int>(), j.at("max_degree").get<int>());
  for (const auto& t : j.at("terms")) {
    MultiIndex m(f.nvars());
    const auto& exps = t.at("exp");
    for (int i = 0; i < f.nvars(); ++i) m.set(i, exps.at(static_cast<size_t>(i)).get<int>());
    f.set_coeff(m, cplx(t.at("re").get<double>(), t.at("im").get<double>()));
  }
  return f;
}

std::vector<PowerSeries> invert_map(const std::vector<PowerSeries>& g) {
  int n = static_cast<int>(g.size());
  if (n == 0) throw CompositionError("invert_map on empty map");
  int nv = g.front().nvars();
  int D = g.front().max_degree();
  if (nv != n) throw CompositionError("invert_map needs a self-map: components == variables");
  for (const auto& gi : g) {
    if (gi.nvars() != nv || gi.max_degree() != D)
      throw CompositionError("map components must share variables and degree");
    MultiIndex zero(nv);
    if (gi.coeff(zero) != cplx(0.0)) throw CompositionError("map must fix the origin");
  }
  Eigen::MatrixXcd L(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      L(i, j) = g[static_cast<size_t>(i)].coeff([&] {
        MultiIndex m(nv);
        m.set(j, 1);
        return m;
      }());
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(L);
  if (!lu.isInvertible()) throw SingularMapError("map has singular linear part");
  Eigen::MatrixXcd Linv = lu.inverse();

  // ghat = g - L; iterate h <- Linv * (id - ghat(h)), gaining one degree per pass.
  std::vector<PowerSeries> ghat = g;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      MultiIndex m(nv);
      m.set(j, 1);
      ghat[static_cast<size_t>(i)].set_coeff(m, 0.0);
    }
  std::vector<PowerSeries> h(static_cast<size_t>(n), PowerSeries(nv, D));
  for (int i = 0; i < n; ++i) {
    PowerSeries hi(nv, D);
    for (int j = 0; j < n; ++j)
      hi += PowerSeries::variable(nv, D, j) * Linv(i, j);
    h[static_cast<size_t>(i)] = hi;
  }
  for (int pass = 0; pass < D; ++pass) {
    std::vector<PowerSeries> gh(static_cast<size_t>(n), PowerSeries(nv, D));
    for (int j = 0; j < n; ++j) gh[static_cast<size_t>(j)] = ghat[static_cast<size_t>(j)].compose(h);
    std::vector<PowerSeries> hn(static_cast<size_t>(n), PowerSeries(nv, D));
    for (int i = 0; i < n; ++i) {
      PowerSeries hi(nv, D);
      for (int j = 0; j < n; ++j)
        hi += (PowerSeries::variable(nv, D, j) - gh[static_cast<size_t>(j)]) * Linv(i, j);
      hn[static_cast<size_t>(i)] = hi;
    }
    h = hn;
  }
  return h;
}

}  // namespace bt::series
