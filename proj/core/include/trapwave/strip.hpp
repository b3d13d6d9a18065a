#pragma once

#include <optional>
#include <span>
#include <vector>

#include "trapwave/bands.hpp"
#include "trapwave/eigensolve.hpp"
#include "trapwave/geometry.hpp"
#include "trapwave/operator.hpp"

namespace trapwave {

// A strip spec resolved on a grid. Built once and shared by the dispersion,
// Jordan-chain and flux computations so all of them index the same unknowns.
struct StripDomain {
  StripSpec strip;
  GridSpec grid;
  CellRaster raster;
  DomainMask mask;
};

StripDomain make_strip_domain(const StripSpec& strip, const GridSpec& grid);

// Strip operator with phase e^{i zeta} across one x1 period.
HermitianOperator strip_operator(const StripDomain& domain, double zeta);

// Floquet wave number per unit length for a phase per period.
inline double wavenumber(double zeta, const CellSpec& cell) { return zeta / (2.0 * cell.l1); }

// Threshold for "strictly below the essential spectrum": M1 < ess - max(1e-8, 1e-3 ess).
bool below_essential(double m1, double ess);

// M_sharp = pi^2 / (2 J l2)^2, the quotient of the sine test function on the
// filled block.
double m_sharp(double l2, int J);

struct StripOptions {
  int essential_samples = 17;
  SolverOptions solver;
  unsigned threads = 1;
};

// min over sampled theta2 of the first cell eigenvalue at theta1 = zeta.
double essential_bound(double zeta, const CellSpec& cell, const GridSpec& grid, int sampling,
                       const SolverOptions& opts = {});

struct DispersionSample {
  double zeta = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double ess = 0.0;
  bool trapped = false;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct DispersionCurve {
  int J = 0;
  double l1 = 0.0;
  double l2 = 0.0;
  double m_sharp = 0.0;
  std::vector<DispersionSample> samples;  // ascending zeta, zeta = 0 present
  std::optional<Interval> b_sharp;        // [M1(0), M_sharp) when trapped at zeta = 0

  const DispersionSample& at_zero() const;
  // Sample whose zeta equals `zeta` to 1e-12, or nullptr.
  const DispersionSample* find(double zeta) const;
  void validate() const;
};

// 33 uniform phases on [-pi, pi] merged with 7 points on [-0.15, 0.15].
std::vector<double> default_zeta_samples();

// Sorted, deduplicated union of phase lists (tolerance 1e-12).
std::vector<double> merge_zetas(std::span<const double> a, std::span<const double> b);

DispersionCurve dispersion_curve(const StripSpec& strip, const GridSpec& grid,
                                 std::span<const double> zetas, const StripOptions& opts = {});

struct FeasibilityReport {
  double m_sharp = 0.0;
  double lateral_bound = 0.0;  // pi^2 / (2 l1)^2
  double lambda_star = 0.0;
  bool holds = false;
};

FeasibilityReport check_feasibility(const StripSpec& strip, const FriedrichsResult& friedrichs);

struct LemmaBReport {
  double m1 = 0.0;
  double m2 = 0.0;
  double m_sharp = 0.0;
  bool below_sharp = false;  // M1(0) < M_sharp
  bool unique = false;       // M2(0) >= M_sharp - tol
  bool pass = false;
};

// Throws ScientificFailure when M1(0) and M2(0) form a cluster.
LemmaBReport check_lemma_b(const DispersionCurve& curve, double tol = 1e-6);

struct MonotoneReport {
  double min_rise = 0.0;        // min over trapped zeta != 0 of M1(zeta) - M1(0)
  double max_asymmetry = 0.0;   // max |M1(zeta) - M1(-zeta)| over mirrored pairs
  int mirrored_pairs = 0;
  bool pass = false;
};

MonotoneReport check_monotone_start(const DispersionCurve& curve, double even_tol = 1e-9);

struct WaveguideBand {
  bool exists = false;
  double lo = 0.0;           // M1(0)
  double hi = 0.0;           // open end, min(M_sharp, sampled_top)
  double sampled_top = 0.0;  // largest trapped M1 among the samples
  std::optional<double> cutoff;
  bool below_cutoff = false;  // hi <= cutoff + 1e-8
};

// [M1(0), min(M_sharp, largest trapped M1)); exists = false when zeta = 0 is
// not trapped or M1(0) >= M_sharp.
WaveguideBand waveguide_band(const DispersionCurve& curve, std::optional<double> cutoff = std::nullopt);

struct DecayEstimate {
  double beta_hat = 0.0;            // 1/length
  std::vector<double> cell_norms;   // from the inclusion outward
  bool decaying = false;
};

// Mean of -(1/width) log(n_{k+1}/n_k) over consecutive slabs, the last slab
// left out. Needs at least 3 slabs.
DecayEstimate decay_from_slab_norms(std::vector<double> norms, double slab_width);

// Slab norms of a strip eigenfield, combining the slabs at equal distance
// above and below the filled block.
DecayEstimate decay_rate(const EigenPair& pair, const StripSpec& strip, const GridSpec& grid);

}  // namespace trapwave
