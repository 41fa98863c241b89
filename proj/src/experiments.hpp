#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "fit.hpp"
#include "models.hpp"
#include "symbol.hpp"
#include "toeplitz.hpp"
#include "wkb.hpp"

namespace bt::experiments {

using nlohmann::json;
using series::PowerSeries;

/// A named symbol family: the chart sampler used for matrix assembly plus
/// the polarized germ(s) at the well(s) used for the asymptotic expansion.
struct Family {
  std::string name;
  models::KahlerModel model;
  quant::SymbolOnChart chart;
  std::function<PowerSeries(int D)> germ;
  /// Germ at the second well in its own chart; empty for single-well families.
  std::function<PowerSeries(int D)> germ_mirror;
};

/// Families, selected by spec["name"]:
///  - "plane-isotropic":             f = |z|^2
///  - "plane-quadratic" (a, b, angle): rotated positive quadratic form
///  - "plane-quartic" (eps):         f = |z|^2 + 2 eps Re z^4, eps < 1/80
///  - "cp1-tilted-well" (alpha, beta): (1 + n3)(1 + alpha n1) + beta n1^2
///  - "cp1-poly-n3" (coeffs):        f = sum_j c_j n3^j, wells at both poles
///  - "cp1-double-well-bump" (support = [lo, hi], eta): 1 - n3^2 plus a
///    smooth bump of height eta supported on n3 in [lo, hi]
Family make_family(const json& spec);

/// Worker count from BTWKB_THREADS (default 1).
int thread_count();

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
/// Minimal line plot, one polyline per series, shared x.
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::vector<double>& x, const std::vector<std::vector<double>>& ys);

struct ResidualRow {
  int N = 0;
  int kmax = 0;
  double lambda_N = 0.0;   // summed eigenvalue series at N
  double min_eig = 0.0;    // bottom of the spectrum
  double diff = 0.0;       // |min_eig - lambda_N|
  double residual = 0.0;   // ||T v - lambda_N v|| / ||v|| for the embedded state
  double tail_basis = 0.0;
  double tail_radial = 0.0;
};

struct ResidualSweep {
  std::vector<ResidualRow> rows;
  fit::LinearFit residual_fit;  // log residual against N
  fit::LinearFit diff_fit;      // log diff against N
  symbols::EnvelopeFit envelope;
  double lambda0 = 0.0;
  double hj_eikonal = 0.0;
  double order_defect = 0.0;
};

/// cfg: family, K, D (optional), N (list), kmax (optional fixed rank),
/// disk_radius (optional).
ResidualSweep run_residual_sweep(const json& cfg);

struct GapSeries {
  std::string label;
  std::vector<double> gaps;     // aligned with Ns
  fit::LinearFit fit;           // log gap against N (only when all gaps > 0)
};

struct GapSweep {
  std::vector<int> Ns;
  std::vector<GapSeries> series;
};

/// cfg: family (symmetric base), N (list), bumps (list of {support, eta});
/// the first series is the unperturbed baseline.
GapSweep run_gap_sweep(const json& cfg);

struct CountRow {
  int N = 0;
  double threshold = 0.0;
  int count = 0;
};

struct CountResult {
  double lambda0_a = 0.0;  // leading ground energy at each well
  double lambda0_b = 0.0;
  double epsilon = 0.0;    // half the splitting of the leading energies
  std::vector<CountRow> rows;
};

/// cfg: family (two wells), N (list), K (optional).
CountResult run_count(const json& cfg);

/// Dispatch on cfg["experiment"] ("wkb", "spectrum", "residual-sweep",
/// "gap-sweep", "count", "profile"), write CSV/JSON/SVG artifacts into
/// out_dir, and return the report.
json run_experiment(const json& cfg, const std::string& out_dir);

}  // namespace bt::experiments
