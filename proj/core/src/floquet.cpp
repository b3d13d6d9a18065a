#include "trapwave/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "trapwave/errors.hpp"

namespace trapwave {

namespace {

// Values of a wave field on node columns of any integer index, using the
// extension rule.
class ExtendedField {
 public:
  ExtendedField(const WaveField& w, const DomainMask& mask) : w_(w), mask_(mask) {}

  Complex at(int c, int j) const {
    const int nx = mask_.nx;
    const int m = c >= 0 ? c / nx : -((-c + nx - 1) / nx);
    const int u = mask_.unknown(c - m * nx, j);
    if (u < 0) return 0.0;
    Complex v = w_.values[u];
    if (!w_.growth.empty()) v += static_cast<double>(m) * w_.growth[u];
    if (m != 0 && w_.zeta != 0.0) v *= std::polar(1.0, w_.zeta * m);
    return v;
  }

  Complex d1(int c, int j) const { return (at(c + 1, j) - at(c - 1, j)) / (2.0 * mask_.h); }

 private:
  const WaveField& w_;
  const DomainMask& mask_;
};

void check_field(const WaveField& w, const DomainMask& mask) {
  if (w.values.size() != static_cast<std::size_t>(mask.active_count()))
    throw InvalidInput("wave field does not match the strip grid");
  if (!w.growth.empty() && w.growth.size() != w.values.size())
    throw InvalidInput("wave field growth vector has the wrong length");
}

using Field = std::vector<Complex>;

// Central difference along x1 (and the x1 neighbour average) at zeta = 0.
Field difference_x1(const DomainMask& mask, const Field& u) {
  Field out(u.size());
  for (int k = 0; k < mask.active_count(); ++k) {
    const int node = mask.node_of_unknown[k];
    const int i = node % mask.nx, j = node / mask.nx;
    const int r = mask.unknown((i + 1) % mask.nx, j);
    const int l = mask.unknown((i + mask.nx - 1) % mask.nx, j);
    const Complex ur = r >= 0 ? u[r] : 0.0;
    const Complex ul = l >= 0 ? u[l] : 0.0;
    out[k] = (ur - ul) / (2.0 * mask.h);
  }
  return out;
}

Field average_x1(const DomainMask& mask, const Field& u) {
  Field out(u.size());
  for (int k = 0; k < mask.active_count(); ++k) {
    const int node = mask.node_of_unknown[k];
    const int i = node % mask.nx, j = node / mask.nx;
    const int r = mask.unknown((i + 1) % mask.nx, j);
    const int l = mask.unknown((i + mask.nx - 1) % mask.nx, j);
    out[k] = 0.5 * ((r >= 0 ? u[r] : 0.0) + (l >= 0 ? u[l] : 0.0));
  }
  return out;
}

void axpy(Complex a, const Field& x, Field& y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += a * x[k];
}

double field_norm(const Field& v, double h) { return std::sqrt(weighted_norm_sq(v, h)); }

}  // namespace

std::string to_string(WaveKind kind) {
  switch (kind) {
    case WaveKind::Standing: return "standing";
    case WaveKind::Resonance: return "resonance";
    case WaveKind::PacketPlus: return "packet+";
    case WaveKind::PacketMinus: return "packet-";
    case WaveKind::Propagating: return "propagating";
  }
  return "unknown";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Outgoing: return "Outgoing";
    case Verdict::Incoming: return "Incoming";
    case Verdict::Null: return "Null";
  }
  return "unknown";
}

Complex symplectic_form(const WaveField& u, const WaveField& v, int shift) {
  if (!(u.strip == v.strip) || !(u.grid == v.grid))
    throw InvalidInput("symplectic_form: fields live on different strips or grids");
  const DomainMask mask = build_strip_mask(u.strip, u.grid);
  check_field(u, mask);
  check_field(v, mask);
  const ExtendedField eu(u, mask), ev(v, mask);
  Complex sum = 0.0;
  for (int j = 1; j + 1 < mask.ny; ++j) {
    for (int c = shift; c < shift + mask.nx; ++c) {
      const Complex uc = eu.at(c, j), vc = ev.at(c, j);
      sum += std::conj(vc) * eu.d1(c, j) - uc * std::conj(ev.d1(c, j));
    }
  }
  return sum * (mask.h * mask.h);
}

JordanChain jordan_chain(const StripSpec& strip, const GridSpec& grid, const JordanOptions& opts) {
  const StripDomain domain = make_strip_domain(strip, grid);
  const DomainMask& mask = domain.mask;
  const double h = grid.h;
  const HermitianOperator a0 = strip_operator(domain, 0.0);
  const auto pairs = smallest_eigenpairs(a0, 2, opts.solver);

  JordanChain chain;
  chain.strip = strip;
  chain.grid = grid;
  chain.m0 = pairs[0].value;
  chain.ess0 = essential_bound(0.0, strip.cell, grid, opts.essential_samples, opts.solver);
  if (!below_essential(chain.m0, chain.ess0)) {
    std::ostringstream os;
    os << "jordan_chain: no trapped mode at zeta = 0 (M1 = " << chain.m0 << ", essential bound "
       << chain.ess0 << ")";
    throw InvalidInput(os.str());
  }
  const double pair_values[2] = {pairs[0].value, pairs[1].value};
  if (eigenvalue_clusters(pair_values).size() == 1)
    throw ScientificFailure("jordan_chain: lowest strip eigenvalue at zeta = 0 is not simple");

  const int n = mask.active_count();
  Field w0(n);
  double mean = 0.0;
  for (int k = 0; k < n; ++k) {
    w0[k] = pairs[0].field[k].real();
    mean += w0[k].real();
  }
  const double scale = (mean < 0.0 ? -1.0 : 1.0) / field_norm(w0, h);
  for (Complex& z : w0) z *= scale;
  chain.norm_w0_sq = weighted_norm_sq(w0, h);

  // F1 = 2i d1 W0; solve (A - M0) y = 2 d1 W0 on the complement of W0.
  Field f = difference_x1(mask, w0);
  for (Complex& z : f) z *= 2.0;
  chain.compatibility = std::abs(Complex(0.0, 1.0) * weighted_dot(w0, f, h));
  if (chain.compatibility > opts.compatibility_tolerance * chain.norm_w0_sq) {
    std::ostringstream os;
    os << "jordan_chain: compatibility integral " << chain.compatibility << " exceeds "
       << opts.compatibility_tolerance;
    throw ScientificFailure(os.str());
  }
  auto project = [&](Field& v) { axpy(-weighted_dot(w0, v, h) / chain.norm_w0_sq, w0, v); };
  auto apply_b = [&](const Field& v) {
    Field out = matvec(a0, v);
    axpy(-chain.m0, v, out);
    project(out);
    return out;
  };
  project(f);
  const double f_norm = field_norm(f, h);

  Field y(n, 0.0), r = f, p = r;
  double rr = weighted_norm_sq(r, h);
  const int max_iter = 20 * n;
  int it = 0;
  while (std::sqrt(rr) > opts.cg_tolerance * f_norm) {
    if (++it > max_iter)
      throw SolverFailure("jordan_chain: conjugate gradient for the associated vector did not converge");
    const Field bp = apply_b(p);
    const double alpha = rr / weighted_dot(p, bp, h).real();
    axpy(alpha, p, y);
    axpy(-alpha, bp, r);
    const double rr_next = weighted_norm_sq(r, h);
    for (int k = 0; k < n; ++k) p[k] = r[k] + (rr_next / rr) * p[k];
    rr = rr_next;
  }
  project(y);
  chain.cg_iterations = it;
  {
    Field res = apply_b(y);
    axpy(-1.0, f, res);
    chain.w1_residual = field_norm(res, h) / f_norm;
  }

  Field w1(n);
  for (int k = 0; k < n; ++k) w1[k] = Complex(0.0, y[k].real());
  chain.w0_w1_overlap = std::abs(weighted_dot(w0, w1, h));

  // F2 = 2i d1 W1 - avg W0, the second kappa-derivative of the gauged pencil.
  Field f2 = difference_x1(mask, w1);
  for (Complex& z : f2) z *= Complex(0.0, 2.0);
  axpy(-1.0, average_x1(mask, w0), f2);
  const Complex b = -weighted_dot(w0, f2, h);
  chain.b = b.real();
  chain.b_imag_residue = std::abs(b.imag());
  if (!(chain.b > 0.0)) {
    std::ostringstream os;
    os << "jordan_chain: b = " << chain.b << " is not positive";
    throw ScientificFailure(os.str());
  }

  chain.w0.resize(n);
  chain.y.resize(n);
  for (int k = 0; k < n; ++k) {
    chain.w0[k] = w0[k].real();
    chain.y[k] = y[k].real();
  }
  return chain;
}

WaveField standing_wave(const JordanChain& chain) {
  WaveField w;
  w.kind = WaveKind::Standing;
  w.strip = chain.strip;
  w.grid = chain.grid;
  w.values.assign(chain.w0.begin(), chain.w0.end());
  return w;
}

WaveField resonance_wave(const JordanChain& chain) {
  const DomainMask mask = build_strip_mask(chain.strip, chain.grid);
  if (chain.w0.size() != static_cast<std::size_t>(mask.active_count()))
    throw InvalidInput("resonance_wave: chain does not match its strip grid");
  WaveField w;
  w.kind = WaveKind::Resonance;
  w.strip = chain.strip;
  w.grid = chain.grid;
  w.values.resize(chain.w0.size());
  w.growth.resize(chain.w0.size());
  const double period = 2.0 * chain.strip.cell.l1;
  for (int k = 0; k < mask.active_count(); ++k) {
    const double x = mask.x(mask.node_of_unknown[k] % mask.nx);
    w.values[k] = Complex(0.0, x * chain.w0[k] + chain.y[k]);
    w.growth[k] = Complex(0.0, period * chain.w0[k]);
  }
  return w;
}

WavePackets wave_packets(const JordanChain& chain) {
  const WaveField w0 = standing_wave(chain);
  const WaveField w1 = resonance_wave(chain);
  WavePackets out;
  out.plus = w1;
  out.minus = w1;
  out.plus.kind = WaveKind::PacketPlus;
  out.minus.kind = WaveKind::PacketMinus;
  for (std::size_t k = 0; k < w0.values.size(); ++k) {
    out.plus.values[k] += w0.values[k];
    out.minus.values[k] -= w0.values[k];
  }
  const WaveField* fields[2] = {&out.plus, &out.minus};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) out.q[r][c] = symplectic_form(*fields[r], *fields[c]);
  const Complex target(0.0, 2.0 * chain.b);
  out.diagonal_error = std::max(std::abs(out.q[0][0] - target), std::abs(out.q[1][1] + target)) /
                       (2.0 * chain.b);
  out.off_diagonal = std::max(std::abs(out.q[0][1]), std::abs(out.q[1][0])) / chain.b;
  return out;
}

WaveClassification classify_wave(const WaveField& w) {
  WaveClassification c;
  c.q_value = symplectic_form(w, w);
  const double energy = weighted_norm_sq(w.values, w.grid.h);
  if (!(energy > 0.0)) throw InvalidInput("classify_wave: zero field");
  const double threshold = 1e-6 * energy;
  c.margin = std::abs(c.q_value.imag()) / energy;
  if (c.q_value.imag() > threshold)
    c.verdict = Verdict::Outgoing;
  else if (c.q_value.imag() < -threshold)
    c.verdict = Verdict::Incoming;
  return c;
}

FloquetWave floquet_wave(const StripSpec& strip, const GridSpec& grid, double zeta,
                         const SolverOptions& opts) {
  const StripDomain domain = make_strip_domain(strip, grid);
  auto pairs = smallest_eigenpairs(strip_operator(domain, zeta), 1, opts);
  FloquetWave out;
  out.m1 = pairs.front().value;
  out.field.kind = WaveKind::Propagating;
  out.field.zeta = zeta;
  out.field.strip = strip;
  out.field.grid = grid;
  out.field.values = std::move(pairs.front().field);
  return out;
}

GroupVelocityReport group_velocity_check(const StripSpec& strip, const GridSpec& grid, double zeta,
                                         double step, const SolverOptions& opts) {
  GroupVelocityReport r;
  r.zeta = zeta;
  if (!(step > 0.0)) throw InvalidInput("group_velocity_check: step must be positive");
  if (std::abs(zeta) + step > std::numbers::pi)
    throw InvalidInput("group_velocity_check: zeta +- step leaves [-pi, pi]");
  if (zeta == 0.0) {
    r.skipped = true;
    return r;
  }
  const FloquetWave centre = floquet_wave(strip, grid, zeta, opts);
  const double up = floquet_wave(strip, grid, zeta + step, opts).m1;
  const double down = floquet_wave(strip, grid, zeta - step, opts).m1;
  r.fd_slope = (up - down) / (2.0 * step) * (2.0 * strip.cell.l1);
  const WaveClassification c = classify_wave(centre.field);
  r.a = c.q_value.imag();
  r.flux_slope = r.a / weighted_norm_sq(centre.field.values, grid.h);
  r.relative_error = std::abs(r.fd_slope - r.flux_slope) / std::abs(r.fd_slope);
  r.verdict = c.verdict;
  return r;
}

ParabolaReport parabola_check(const DispersionCurve& curve, const JordanChain& chain, double window,
                              double tol) {
  if (curve.J != chain.strip.J || curve.l1 != chain.strip.cell.l1 || curve.l2 != chain.strip.cell.l2)
    throw InvalidInput("parabola_check: curve and chain come from different strips");
  auto near = [&](double z) -> const DispersionSample* {
    for (const DispersionSample& s : curve.samples)
      if (std::abs(s.zeta - z) <= 1e-9) return &s;
    return nullptr;
  };
  const DispersionSample* s_small = near(0.05);
  const DispersionSample* s_large = near(0.1);
  if (!s_small || !s_large || !near(-0.05) || !near(-0.1))
    throw InvalidInput("parabola_check: needs samples at zeta = +-0.05 and +-0.1");

  ParabolaReport r;
  const double m0 = curve.at_zero().m1;
  const double inv_period = 1.0 / (2.0 * curve.l1);
  // Least squares for M1 = alpha + beta kappa^2.
  double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
  for (const DispersionSample& s : curve.samples) {
    if (std::abs(s.zeta) > window + 1e-12) continue;
    const double k2 = std::pow(s.zeta * inv_period, 2);
    s0 += 1;
    s1 += k2;
    s2 += k2 * k2;
    t0 += s.m1;
    t1 += k2 * s.m1;
    ++r.samples_used;
  }
  if (r.samples_used < 5) throw InvalidInput("parabola_check: fewer than 5 samples near zeta = 0");
  r.fit_curvature = (s0 * t1 - s1 * t0) / (s0 * s2 - s1 * s1);
  r.chain_curvature = chain.curvature();
  r.relative_error = std::abs(r.fit_curvature - r.chain_curvature) / std::abs(r.chain_curvature);
  auto residual = [&](const DispersionSample& s) {
    return s.m1 - m0 - r.chain_curvature * std::pow(s.zeta * inv_period, 2);
  };
  r.residual_small = residual(*s_small);
  r.residual_large = residual(*s_large);
  r.residual_ratio = r.residual_large / r.residual_small;
  r.pass = r.fit_curvature > 0.0 && r.relative_error <= tol && r.residual_ratio >= 8.0 &&
           r.residual_ratio <= 32.0;
  return r;
}

}  // namespace trapwave
