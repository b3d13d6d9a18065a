#pragma once

#include <vector>

#include "trapwave/eigensolve.hpp"
#include "trapwave/geometry.hpp"
#include "trapwave/operator.hpp"

namespace trapwave {

struct BandSample {
  BlochParameter theta;
  std::vector<double> values;  // first k cell eigenvalues, ascending
};

// Cell eigenvalues on a tensor grid of Bloch phases over [-pi, pi]^2.
struct BandStructure {
  int k = 0;
  int samples1 = 0;
  int samples2 = 0;
  std::vector<BandSample> samples;  // theta1 fastest
  double cutoff = 0.0;              // min over samples of the first value

  void validate() const;
};

// Closed interval swept by the n-th eigenvalue (n is 1-based).
struct Band {
  int n = 0;
  double lo = 0.0;
  double hi = 0.0;
};

// Relation between consecutive bands n and n+1.
struct BandGap {
  int below = 0;
  double lo = 0.0;  // hi of band n
  double hi = 0.0;  // lo of band n+1
  bool open = false;
};

struct FriedrichsResult {
  double lambda_star = 0.0;
  GridSpec grid;
};

struct LemmaAReport {
  double lambda_at_zero = 0.0;
  double min_elsewhere = 0.0;
  BlochParameter argmin;
  double margin = 0.0;
  bool pass = false;
};

struct BandSweepOptions {
  int samples1 = 17;
  int samples2 = 17;
  int k = 1;
  SolverOptions solver;
  unsigned threads = 1;
};

// Phases -pi + 2 pi i / (count - 1); the middle entry of an odd count is
// exactly zero.
std::vector<double> uniform_phases(int count);

// Smallest k eigenvalues of the cell operator at one Bloch phase.
std::vector<double> cell_eigenvalues(const CellSpec& cell, const GridSpec& grid,
                                     const BlochParameter& theta, int k, const SolverOptions& opts = {});

BandStructure cell_band_structure(const CellSpec& cell, const GridSpec& grid,
                                  const BandSweepOptions& opts = {});

std::vector<Band> spectral_bands(const BandStructure& bs);
// A gap narrower than `rel` relative is touching bands, not a gap.
std::vector<BandGap> band_gaps(const std::vector<Band>& bands, double rel = 1e-8);

// Principal eigenvalue with Neumann on the cell sides and Dirichlet on the
// hole. Rejects hole-free cells.
FriedrichsResult friedrichs_constant(const CellSpec& cell, const GridSpec& grid,
                                     const SolverOptions& opts = {});

// theta = 0 must be one of the samples; `min_margin` is the strictness margin.
LemmaAReport check_lemma_a(const BandStructure& bs, double min_margin = 1e-9);

}  // namespace trapwave
