#include "trapwave/bands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "trapwave/errors.hpp"
#include "trapwave/parallel.hpp"

namespace trapwave {

void BandStructure::validate() const {
  if (samples.empty()) throw InvalidInput("band structure has no samples");
  double lo = std::numeric_limits<double>::infinity();
  for (const BandSample& s : samples) {
    if (static_cast<int>(s.values.size()) != k) throw InvalidInput("band sample carries the wrong number of values");
    if (!std::is_sorted(s.values.begin(), s.values.end())) throw InvalidInput("band sample values not ascending");
    lo = std::min(lo, s.values.front());
  }
  if (lo != cutoff) throw InvalidInput("band structure cutoff differs from the minimum first value");
}

std::vector<double> uniform_phases(int count) {
  if (count < 2) throw InvalidInput("phase sampling needs at least 2 points");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[i] = -std::numbers::pi + 2.0 * std::numbers::pi * (static_cast<double>(i) / (count - 1));
    if (2 * i == count - 1) out[i] = 0.0;
  }
  return out;
}

std::vector<double> cell_eigenvalues(const CellSpec& cell, const GridSpec& grid,
                                     const BlochParameter& theta, int k, const SolverOptions& opts) {
  const HermitianOperator op = assemble(build_cell_mask(cell, grid), theta);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k));
  for (const EigenPair& p : smallest_eigenpairs(op, k, opts)) out.push_back(p.value);
  return out;
}

BandStructure cell_band_structure(const CellSpec& cell, const GridSpec& grid, const BandSweepOptions& opts) {
  if (opts.samples1 < 5 || opts.samples2 < 5) throw InvalidInput("band sweep needs at least 5 samples per axis");
  if (opts.k < 1) throw InvalidInput("band sweep needs k >= 1");
  const DomainMask mask = build_cell_mask(cell, grid);
  const auto t1 = uniform_phases(opts.samples1);
  const auto t2 = uniform_phases(opts.samples2);

  BandStructure bs;
  bs.k = opts.k;
  bs.samples1 = opts.samples1;
  bs.samples2 = opts.samples2;
  bs.samples.resize(t1.size() * t2.size());
  parallel_for(bs.samples.size(), opts.threads, [&](std::size_t idx) {
    const BlochParameter theta{t1[idx % t1.size()], t2[idx / t1.size()]};
    BandSample& s = bs.samples[idx];
    s.theta = theta;
    try {
      for (const EigenPair& p : smallest_eigenpairs(assemble(mask, theta), opts.k, opts.solver))
        s.values.push_back(p.value);
    } catch (const SolverFailure& e) {
      std::ostringstream os;
      os << e.what() << " [cell problem at theta = (" << theta.theta1 << ", " << theta.theta2 << ")]";
      throw SolverFailure(os.str());
    }
  });
  bs.cutoff = std::numeric_limits<double>::infinity();
  for (const BandSample& s : bs.samples) bs.cutoff = std::min(bs.cutoff, s.values.front());
  return bs;
}

std::vector<Band> spectral_bands(const BandStructure& bs) {
  if (bs.samples.empty()) throw InvalidInput("spectral_bands: empty band structure");
  std::vector<Band> out;
  for (int n = 0; n < bs.k; ++n) {
    Band b{n + 1, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const BandSample& s : bs.samples) {
      b.lo = std::min(b.lo, s.values[n]);
      b.hi = std::max(b.hi, s.values[n]);
    }
    out.push_back(b);
  }
  return out;
}

std::vector<BandGap> band_gaps(const std::vector<Band>& bands, double rel) {
  std::vector<BandGap> out;
  for (std::size_t n = 0; n + 1 < bands.size(); ++n) {
    const double lo = bands[n].hi, hi = bands[n + 1].lo;
    out.push_back({bands[n].n, lo, hi, hi - lo > rel * std::max(std::abs(lo), std::abs(hi))});
  }
  return out;
}

FriedrichsResult friedrichs_constant(const CellSpec& cell, const GridSpec& grid, const SolverOptions& opts) {
  if (!cell.hole) throw InvalidInput("Friedrichs constant needs a cell with a hole (it vanishes otherwise)");
  const DomainMask mask = build_neumann_cell_mask(cell, grid);
  const HermitianOperator op = assemble(mask, {}, OuterBoundary::all(BoundaryKind::Neumann));
  return {smallest_eigenpairs(op, 1, opts).front().value, grid};
}

LemmaAReport check_lemma_a(const BandStructure& bs, double min_margin) {
  const BandSample* zero = nullptr;
  for (const BandSample& s : bs.samples)
    if (s.theta.theta1 == 0.0 && s.theta.theta2 == 0.0) zero = &s;
  if (!zero) throw InvalidInput("check_lemma_a needs the theta = 0 sample");
  LemmaAReport rep;
  rep.lambda_at_zero = zero->values.front();
  rep.min_elsewhere = std::numeric_limits<double>::infinity();
  for (const BandSample& s : bs.samples) {
    if (&s == zero) continue;
    if (s.values.front() < rep.min_elsewhere) {
      rep.min_elsewhere = s.values.front();
      rep.argmin = s.theta;
    }
  }
  rep.margin = rep.min_elsewhere - rep.lambda_at_zero;
  rep.pass = rep.margin > min_margin;
  return rep;
}

}  // namespace trapwave
