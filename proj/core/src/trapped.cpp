#include "trapwave/trapped.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "trapwave/errors.hpp"

namespace trapwave {

double explicit_bound(int J1, int J2, const CellSpec& cell) {
  if (J1 < 1 || J2 < 1) throw InvalidInput("explicit_bound: J1 and J2 must be >= 1");
  const double a = J1 * cell.l1, b = J2 * cell.l2;
  return std::numbers::pi * std::numbers::pi / 4.0 * (1.0 / (a * a) + 1.0 / (b * b));
}

void PerturbedLayout::validate() const {
  if (J1 < 1 || J2 < 1) throw InvalidInput("perturbed layout: J1 and J2 must be >= 1");
  if (guide_rows < 1 || guide_rows > J2 || (J2 - guide_rows) % 2 != 0)
    throw InvalidInput("perturbed layout: guide rows must be centred on the block (J2 - rows even)");
  if (guide_length < 4) throw InvalidInput("perturbed layout: guide must run at least 4 cells");
  if (padding < 4) throw InvalidInput("perturbed layout: padding must be at least 4 cells");
}

WindowSpec make_perturbed_window(const CellSpec& cell, const PerturbedLayout& layout) {
  layout.validate();
  WindowSpec w;
  w.cell = cell;
  w.col_lo = -layout.padding;
  w.col_hi = layout.J1 + layout.guide_length - 1;
  w.row_lo = -layout.padding;
  w.row_hi = layout.J2 + layout.padding - 1;
  for (int a1 = 0; a1 < layout.J1; ++a1)
    for (int a2 = 0; a2 < layout.J2; ++a2) w.filled.insert({a1, a2});
  for (int a1 = layout.J1; a1 <= w.col_hi; ++a1)
    for (int r = 0; r < layout.guide_rows; ++r) w.filled.insert({a1, layout.guide_row_lo() + r});
  w.validate();
  return w;
}

EigenPair perturbed_ground_state(const WindowSpec& window, const GridSpec& grid,
                                 const SolverOptions& opts) {
  const DomainMask mask = build_window_mask(window, grid);
  auto pairs = smallest_eigenpairs(assemble(mask, BlochParameter{}), 1, opts);
  return std::move(pairs.front());
}

double test_function_quotient(const WindowSpec& window, const PerturbedLayout& layout,
                              const GridSpec& grid) {
  layout.validate();
  for (int a1 = 0; a1 < layout.J1; ++a1)
    for (int a2 = 0; a2 < layout.J2; ++a2)
      if (!window.contains({a1, a2}) || !window.filled.contains({a1, a2}))
        throw InvalidInput("test_function_quotient: window lacks the filled block");
  const DomainMask mask = build_window_mask(window, grid);
  const double l1 = window.cell.l1, l2 = window.cell.l2;
  const double xa = -l1, xb = (2 * layout.J1 - 1) * l1;
  const double ya = -l2, yb = (2 * layout.J2 - 1) * l2;
  const double xc = 0.5 * (xa + xb), yc = 0.5 * (ya + yb);
  const double wx = xb - xa, wy = yb - ya;
  std::vector<Complex> u(mask.active_count(), 0.0);
  for (int k = 0; k < mask.active_count(); ++k) {
    const int node = mask.node_of_unknown[k];
    const double x = mask.x(node % mask.nx), y = mask.y(node / mask.nx);
    if (x <= xa || x >= xb || y <= ya || y >= yb) continue;
    u[k] = std::cos(std::numbers::pi * (x - xc) / wx) * std::cos(std::numbers::pi * (y - yc) / wy);
  }
  const HermitianOperator op = assemble(mask, BlochParameter{});
  const std::vector<Complex> au = matvec(op, u);
  return weighted_dot(u, au, grid.h).real() / weighted_norm_sq(u, grid.h);
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::Left: return "left";
    case Direction::Right: return "right";
    case Direction::Down: return "down";
    case Direction::Up: return "up";
  }
  return "unknown";
}

std::array<DecayEstimate, 4> directional_decay(const EigenPair& pair, const WindowSpec& window,
                                               const PerturbedLayout& layout, const GridSpec& grid) {
  const DomainMask mask = build_window_mask(window, grid);
  if (pair.field.size() != static_cast<std::size_t>(mask.active_count()))
    throw InvalidInput("directional_decay: field does not live on this window grid");
  const CellRaster raster = rasterize(window.cell, grid);
  std::vector<double> col_sq(window.columns(), 0.0), row_sq(window.rows(), 0.0);
  for (int k = 0; k < mask.active_count(); ++k) {
    const int node = mask.node_of_unknown[k];
    const int c = std::min((node % mask.nx) / raster.n1, window.columns() - 1);
    const int r = std::min((node / mask.nx) / raster.n2, window.rows() - 1);
    const double e = std::norm(pair.field[k]) * grid.h * grid.h;
    col_sq[c] += e;
    row_sq[r] += e;
  }
  auto col = [&](int a1) { return std::sqrt(col_sq[a1 - window.col_lo]); };
  auto row = [&](int a2) { return std::sqrt(row_sq[a2 - window.row_lo]); };
  std::vector<double> left, right, down, up;
  for (int a1 = -1; a1 >= window.col_lo; --a1) left.push_back(col(a1));
  for (int a1 = layout.J1; a1 <= window.col_hi; ++a1) right.push_back(col(a1));
  for (int a2 = -1; a2 >= window.row_lo; --a2) down.push_back(row(a2));
  for (int a2 = layout.J2; a2 <= window.row_hi; ++a2) up.push_back(row(a2));
  const double w1 = 2.0 * window.cell.l1, w2 = 2.0 * window.cell.l2;
  return {decay_from_slab_norms(std::move(left), w1), decay_from_slab_norms(std::move(right), w1),
          decay_from_slab_norms(std::move(down), w2), decay_from_slab_norms(std::move(up), w2)};
}

std::string to_string(TrappedVerdict v) {
  switch (v) {
    case TrappedVerdict::Pass: return "pass";
    case TrappedVerdict::Fail: return "fail";
    case TrappedVerdict::BoundNotApplicable: return "bound not applicable";
  }
  return "unknown";
}

TrappedReport verify_trapped(const TrappedInputs& in) {
  if (!(in.window_cell == in.strip.cell))
    throw InvalidInput("verify_trapped: window and strip use different cells");
  if (in.layout.guide_rows != in.strip.J)
    throw InvalidInput("verify_trapped: guide width differs from the strip's filled rows");
  in.layout.validate();

  TrappedReport r;
  r.lambda_computed = in.lambda_computed;
  r.lambda_square = explicit_bound(in.layout.J1, in.layout.J2, in.window_cell);
  r.quotient = in.quotient;
  r.m1_at_zero = in.m1_at_zero;
  r.decay = in.decay;
  if (!(r.lambda_square < r.m1_at_zero)) {
    r.verdict = TrappedVerdict::BoundNotApplicable;
    return r;
  }
  auto fail = [&](const std::string& what) { r.failures.push_back(what); };
  if (!(r.lambda_computed <= r.quotient * (1.0 + 1e-10))) fail("lambda exceeds the test-function quotient");
  if (!(r.quotient <= r.lambda_square + in.grid.h * in.grid.h)) fail("test-function quotient exceeds lambda_square + h^2");
  if (!(r.lambda_computed < r.m1_at_zero)) fail("lambda is not below M1(0)");
  for (int d = 0; d < 4; ++d) {
    if (!r.decay[d].decaying) {
      std::ostringstream os;
      os << "no decay towards " << to_string(static_cast<Direction>(d)) << " (beta = " << r.decay[d].beta_hat << ")";
      fail(os.str());
    }
  }
  r.verdict = r.failures.empty() ? TrappedVerdict::Pass : TrappedVerdict::Fail;
  return r;
}

}  // namespace trapwave
