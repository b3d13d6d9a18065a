#include "trapwave/strip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "trapwave/errors.hpp"
#include "trapwave/parallel.hpp"

namespace trapwave {

StripDomain make_strip_domain(const StripSpec& strip, const GridSpec& grid) {
  StripDomain d{strip, grid, rasterize(strip.cell, grid), build_strip_mask(strip, grid)};
  return d;
}

HermitianOperator strip_operator(const StripDomain& domain, double zeta) {
  return assemble(domain.mask, BlochParameter{zeta, 0.0});
}

bool below_essential(double m1, double ess) { return m1 < ess - std::max(1e-8, 1e-3 * ess); }

double m_sharp(double l2, int J) {
  const double w = 2.0 * J * l2;
  return std::numbers::pi * std::numbers::pi / (w * w);
}

double essential_bound(double zeta, const CellSpec& cell, const GridSpec& grid, int sampling,
                       const SolverOptions& opts) {
  if (sampling < 9) throw InvalidInput("essential_bound needs at least 9 theta2 samples");
  const DomainMask mask = build_cell_mask(cell, grid);
  double best = std::numeric_limits<double>::infinity();
  for (double t2 : uniform_phases(sampling)) {
    const auto pairs = smallest_eigenpairs(assemble(mask, BlochParameter{zeta, t2}), 1, opts);
    best = std::min(best, pairs.front().value);
  }
  return best;
}

const DispersionSample& DispersionCurve::at_zero() const {
  const DispersionSample* s = find(0.0);
  if (!s) throw InvalidInput("dispersion curve lacks the zeta = 0 sample");
  return *s;
}

const DispersionSample* DispersionCurve::find(double zeta) const {
  for (const DispersionSample& s : samples)
    if (std::abs(s.zeta - zeta) <= 1e-12) return &s;
  return nullptr;
}

void DispersionCurve::validate() const {
  if (samples.empty()) throw InvalidInput("dispersion curve has no samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i - 1].zeta < samples[i].zeta)) throw InvalidInput("dispersion samples not sorted by zeta");
  at_zero();
  for (const DispersionSample& s : samples)
    if (s.trapped != below_essential(s.m1, s.ess)) throw InvalidInput("trapped flag inconsistent with M1 and ess");
  if (m_sharp != trapwave::m_sharp(l2, J)) throw InvalidInput("M_sharp inconsistent with (l2, J)");
}

std::vector<double> merge_zetas(std::span<const double> a, std::span<const double> b) {
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double z : all) {
    if (std::abs(z) <= 1e-12) z = 0.0;
    if (out.empty() || std::abs(z - out.back()) > 1e-12) out.push_back(z);
  }
  return out;
}

std::vector<double> default_zeta_samples() {
  const std::vector<double> coarse = uniform_phases(33);
  std::vector<double> fine(7);
  for (int i = 0; i < 7; ++i) fine[i] = -0.15 + 0.05 * i;
  return merge_zetas(coarse, fine);
}

DispersionCurve dispersion_curve(const StripSpec& strip, const GridSpec& grid,
                                 std::span<const double> zetas, const StripOptions& opts) {
  const StripDomain domain = make_strip_domain(strip, grid);
  const std::vector<double> z = merge_zetas(zetas, {});
  if (std::none_of(z.begin(), z.end(), [](double v) { return v == 0.0; }))
    throw InvalidInput("dispersion_curve needs zeta = 0 among the samples");
  for (double v : z)
    if (std::abs(v) > std::numbers::pi + 1e-12) throw InvalidInput("zeta samples must lie in [-pi, pi]");

  DispersionCurve curve;
  curve.J = strip.J;
  curve.l1 = strip.cell.l1;
  curve.l2 = strip.cell.l2;
  curve.m_sharp = m_sharp(strip.cell.l2, strip.J);
  curve.samples.resize(z.size());
  parallel_for(z.size(), opts.threads, [&](std::size_t i) {
    DispersionSample& s = curve.samples[i];
    s.zeta = z[i];
    try {
      const auto pairs = smallest_eigenpairs(strip_operator(domain, z[i]), 2, opts.solver);
      s.m1 = pairs[0].value;
      s.m2 = pairs[1].value;
      s.ess = essential_bound(z[i], strip.cell, grid, opts.essential_samples, opts.solver);
    } catch (const SolverFailure& e) {
      std::ostringstream os;
      os << e.what() << " [strip problem at zeta = " << z[i] << "]";
      throw SolverFailure(os.str());
    }
    s.trapped = below_essential(s.m1, s.ess);
  });
  const DispersionSample& zero = curve.at_zero();
  if (zero.trapped) curve.b_sharp = Interval{zero.m1, curve.m_sharp};
  return curve;
}

FeasibilityReport check_feasibility(const StripSpec& strip, const FriedrichsResult& friedrichs) {
  FeasibilityReport r;
  r.m_sharp = m_sharp(strip.cell.l2, strip.J);
  const double period = 2.0 * strip.cell.l1;
  r.lateral_bound = std::numbers::pi * std::numbers::pi / (period * period);
  r.lambda_star = friedrichs.lambda_star;
  r.holds = r.m_sharp < std::min(r.lateral_bound, r.lambda_star);
  return r;
}

LemmaBReport check_lemma_b(const DispersionCurve& curve, double tol) {
  const DispersionSample& zero = curve.at_zero();
  const double pair[2] = {zero.m1, zero.m2};
  if (eigenvalue_clusters(pair).size() == 1) {
    std::ostringstream os;
    os << "strip eigenvalue at zeta = 0 is degenerate (" << zero.m1 << ", " << zero.m2
       << "); the trapped mode below M_sharp is not simple";
    throw ScientificFailure(os.str());
  }
  LemmaBReport r;
  r.m1 = zero.m1;
  r.m2 = zero.m2;
  r.m_sharp = curve.m_sharp;
  r.below_sharp = zero.m1 < curve.m_sharp;
  r.unique = zero.m2 >= curve.m_sharp - tol;
  r.pass = r.below_sharp && r.unique && zero.trapped;
  return r;
}

MonotoneReport check_monotone_start(const DispersionCurve& curve, double even_tol) {
  const double m0 = curve.at_zero().m1;
  MonotoneReport r;
  r.min_rise = std::numeric_limits<double>::infinity();
  for (const DispersionSample& s : curve.samples) {
    if (s.zeta == 0.0 || !s.trapped) continue;
    r.min_rise = std::min(r.min_rise, s.m1 - m0);
    if (s.zeta > 0.0) {
      if (const DispersionSample* m = curve.find(-s.zeta)) {
        r.max_asymmetry = std::max(r.max_asymmetry, std::abs(s.m1 - m->m1));
        ++r.mirrored_pairs;
      }
    }
  }
  r.pass = r.min_rise > 0.0 && r.max_asymmetry <= even_tol;
  return r;
}

WaveguideBand waveguide_band(const DispersionCurve& curve, std::optional<double> cutoff) {
  WaveguideBand band;
  band.cutoff = cutoff;
  const DispersionSample& zero = curve.at_zero();
  if (!zero.trapped || !(zero.m1 < curve.m_sharp)) return band;
  band.exists = true;
  band.lo = zero.m1;
  band.sampled_top = zero.m1;
  for (const DispersionSample& s : curve.samples)
    if (s.trapped) band.sampled_top = std::max(band.sampled_top, s.m1);
  band.hi = std::min(curve.m_sharp, band.sampled_top);
  band.below_cutoff = cutoff.has_value() && band.hi <= *cutoff + 1e-8;
  return band;
}

DecayEstimate decay_from_slab_norms(std::vector<double> norms, double slab_width) {
  if (norms.size() < 3) throw InvalidInput("decay estimate needs at least 3 outward slabs");
  DecayEstimate d;
  d.cell_norms = std::move(norms);
  const std::size_t used = d.cell_norms.size() - 1;  // last slab feels the truncation
  double sum = 0.0;
  bool decreasing = true;
  for (std::size_t k = 0; k + 1 < used; ++k) {
    const double a = d.cell_norms[k];
    const double b = d.cell_norms[k + 1];
    if (!(b < a)) decreasing = false;
    sum += (a > 0.0 && b > 0.0) ? -std::log(b / a) / slab_width : 0.0;
  }
  d.beta_hat = sum / static_cast<double>(used - 1);
  d.decaying = decreasing && d.beta_hat > 0.0;
  return d;
}

DecayEstimate decay_rate(const EigenPair& pair, const StripSpec& strip, const GridSpec& grid) {
  const StripDomain domain = make_strip_domain(strip, grid);
  const DomainMask& m = domain.mask;
  if (pair.field.size() != static_cast<std::size_t>(m.active_count()))
    throw InvalidInput("decay_rate: field does not live on this strip grid");
  const int n2 = domain.raster.n2;
  std::vector<double> row_sq(static_cast<std::size_t>(strip.rows()), 0.0);
  for (int u = 0; u < m.active_count(); ++u) {
    const int j = m.node_of_unknown[u] / m.nx;
    row_sq[std::min(j / n2, strip.rows() - 1)] += std::norm(pair.field[u]);
  }
  std::vector<double> norms;
  for (int k = 1; k <= strip.K; ++k) {
    const double up = row_sq[strip.K + strip.J - 1 + k];
    const double down = row_sq[strip.K - k];
    norms.push_back(std::sqrt((up + down) * grid.h * grid.h));
  }
  return decay_from_slab_norms(std::move(norms), 2.0 * strip.cell.l2);
}

}  // namespace trapwave
