#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace bt::series {

using cplx = std::complex<double>;

/// Exponent vector of a monomial. At most 4 variables.
struct MultiIndex {
  static constexpr int kMaxVars = 4;
  std::array<std::uint8_t, kMaxVars> e{0, 0, 0, 0};
  int nvars = 1;

  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> xs);
  explicit MultiIndex(int nvars_) : nvars(nvars_) {}

  int order() const;
  int operator[](int i) const { return e[static_cast<size_t>(i)]; }
  void set(int i, int v);
  std::uint32_t key() const;
  bool operator==(const MultiIndex& o) const { return nvars == o.nvars && e == o.e; }
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct CompositionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct SingularMapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shared enumeration of all monomials with order <= max_degree in
/// graded-lexicographic order. Cached per (nvars, max_degree).
class Layout {
 public:
  static std::shared_ptr<const Layout> get(int nvars, int max_degree);

  int nvars() const { return nvars_; }
  int max_degree() const { return max_degree_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const MultiIndex& index(int pos) const { return indices_[static_cast<size_t>(pos)]; }
  int position(const MultiIndex& m) const;           // -1 if order > D
  int degree_begin(int d) const { return degree_begin_[static_cast<size_t>(d)]; }
  int degree_end(int d) const { return degree_begin_[static_cast<size_t>(d) + 1]; }

 private:
  Layout(int nvars, int max_degree);
  int nvars_;
  int max_degree_;
  std::vector<MultiIndex> indices_;
  std::vector<int> degree_begin_;
  std::unordered_map<std::uint32_t, int> pos_;
};

/// Truncated formal power series with complex double coefficients.
/// Immutable value semantics: all arithmetic returns new objects.
/// Binary operations truncate to the smaller max_degree.
class PowerSeries {
 public:
  PowerSeries() : PowerSeries(1, 0) {}
  PowerSeries(int nvars, int max_degree);

  static PowerSeries constant(int nvars, int max_degree, cplx value);
  static PowerSeries variable(int nvars, int max_degree, int var);
  static PowerSeries monomial(int nvars, int max_degree, const MultiIndex& m, cplx value);

  int nvars() const { return layout_->nvars(); }
  int max_degree() const { return layout_->max_degree(); }
  const Layout& layout() const { return *layout_; }

  cplx coeff(const MultiIndex& m) const;
  void set_coeff(const MultiIndex& m, cplx v);
  cplx at(int pos) const { return coeffs_[static_cast<size_t>(pos)]; }
  void set_at(int pos, cplx v) { coeffs_[static_cast<size_t>(pos)] = v; }

  PowerSeries truncated(int new_max_degree) const;
  /// Widen the truncation degree, padding with zeros. Only meaningful when
  /// the series is known exactly (e.g. a polynomial germ).
  PowerSeries extended(int new_max_degree) const;

  PowerSeries operator-() const;
  PowerSeries operator+(const PowerSeries& o) const;
  PowerSeries operator-(const PowerSeries& o) const;
  PowerSeries operator*(const PowerSeries& o) const;
  PowerSeries operator*(cplx s) const;
  PowerSeries& operator+=(const PowerSeries& o) { return *this = *this + o; }

  /// Formal partial derivative; max_degree drops by one.
  PowerSeries differentiate(int var) const;

  /// Taylor coefficients of f(g_1, ..., g_n); every g_i must vanish at 0.
  PowerSeries compose(const std::vector<PowerSeries>& g) const;

  /// 1/f for f(0) != 0.
  PowerSeries reciprocal() const;
  /// f^alpha for f(0) = 1 (binomial series).
  PowerSeries pow_fractional(double alpha) const;

  cplx evaluate(const std::vector<cplx>& point) const;

  /// Sum over |mu| = j of |d^mu f(0)| = sum |c_mu| * mu!.
  double cj_norm_at0(int j) const;
  double max_abs_coeff() const;
  /// Largest |c_mu| over indices of order >= from_degree.
  double max_abs_coeff_from(int from_degree) const;
  bool is_zero(double tol = 0.0) const;

  /// Coefficient reinterpretation (x, xbar) -> (x, wbar): the polarization
  /// of a real-analytic germ has the same Taylor data.
  PowerSeries polarize() const { return *this; }
  /// Check c_{nu mu} = conj(c_{mu nu}) for a 2-variable (x, xbar) germ.
  double hermitian_defect() const;

  nlohmann::json to_json() const;
  static PowerSeries from_json(const nlohmann::json& j);

 private:
  std::shared_ptr<const Layout> layout_;
  std::vector<cplx> coeffs_;
};

inline PowerSeries operator*(cplx s, const PowerSeries& f) { return f * s; }

/// Inverse of a formal map germ g (g_i(0) = 0, invertible linear part):
/// returns h with g(h) = identity up to the common truncation degree.
std::vector<PowerSeries> invert_map(const std::vector<PowerSeries>& g);

double factorial(int n);

}  // namespace bt::series
