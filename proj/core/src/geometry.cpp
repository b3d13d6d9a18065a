#include "trapwave/geometry.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "trapwave/errors.hpp"

namespace trapwave {
namespace {

// Returns the integer n with length == n * h, or throws.
int grid_count(double length, double h, const char* what) {
  const double q = length / h;
  const double r = std::round(q);
  if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) {
    std::ostringstream os;
    os << what << " (" << length << ") is not a multiple of the grid spacing h = " << h;
    throw InvalidInput(os.str());
  }
  return static_cast<int>(r);
}

void finalize_index(DomainMask& mask) {
  mask.unknown_of_node.assign(mask.active.size(), -1);
  mask.node_of_unknown.clear();
  for (std::size_t n = 0; n < mask.active.size(); ++n) {
    if (mask.active[n]) {
      mask.unknown_of_node[n] = static_cast<int>(mask.node_of_unknown.size());
      mask.node_of_unknown.push_back(static_cast<int>(n));
    }
  }
  if (mask.node_of_unknown.empty()) throw InvalidInput("domain mask has no active node");
}

}  // namespace

void CellSpec::validate() const {
  if (!(l1 > 0.0) || !(l2 > 0.0)) throw InvalidInput("cell half-periods l1, l2 must be positive");
  if (hole) {
    const Hole& w = *hole;
    if (!(w.x1min < w.x1max) || !(w.x2min < w.x2max))
      throw InvalidInput("hole rectangle must have positive extent");
    if (!(w.x1min > -l1 && w.x1max < l1 && w.x2min > -l2 && w.x2max < l2))
      throw InvalidInput("hole closure must lie strictly inside (-l1,l1)x(-l2,l2)");
  }
}

CellRaster rasterize(const CellSpec& cell, const GridSpec& grid) {
  cell.validate();
  if (!(grid.h > 0.0)) throw InvalidInput("grid spacing h must be positive");
  CellRaster r;
  r.n1 = grid_count(2.0 * cell.l1, grid.h, "period 2*l1");
  r.n2 = grid_count(2.0 * cell.l2, grid.h, "period 2*l2");
  if (r.n1 < 4 || r.n2 < 4) throw InvalidInput("grid must place at least 4 nodes per period");
  if (cell.hole) {
    const Hole& w = *cell.hole;
    r.has_hole = true;
    r.hole_i0 = grid_count(w.x1min + cell.l1, grid.h, "hole edge x1min");
    r.hole_i1 = grid_count(w.x1max + cell.l1, grid.h, "hole edge x1max");
    r.hole_j0 = grid_count(w.x2min + cell.l2, grid.h, "hole edge x2min");
    r.hole_j1 = grid_count(w.x2max + cell.l2, grid.h, "hole edge x2max");
  }
  return r;
}

void StripSpec::validate() const {
  cell.validate();
  if (J < 1) throw InvalidInput("strip needs J >= 1 filled rows");
  if (K < 2) throw InvalidInput("strip needs K >= 2 perforated cells on each side");
}

void WindowSpec::validate() const {
  cell.validate();
  if (col_hi < col_lo || row_hi < row_lo) throw InvalidInput("window index range is empty");
  for (const CellIndex& c : filled)
    if (!contains(c)) throw InvalidInput("filled cell lies outside the window");
}

DomainMask build_cell_mask(const CellSpec& cell, const GridSpec& grid) {
  const CellRaster r = rasterize(cell, grid);
  DomainMask m;
  m.kind = MaskKind::PeriodicCell;
  m.nx = r.n1;
  m.ny = r.n2;
  m.h = grid.h;
  m.x0 = -cell.l1;
  m.y0 = -cell.l2;
  m.wrap1 = m.wrap2 = true;
  m.active.assign(static_cast<std::size_t>(m.nx) * m.ny, 1);
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i)
      if (r.in_hole(i, j)) m.active[m.node(i, j)] = 0;
  finalize_index(m);
  return m;
}

DomainMask build_neumann_cell_mask(const CellSpec& cell, const GridSpec& grid) {
  const CellRaster r = rasterize(cell, grid);
  DomainMask m;
  m.kind = MaskKind::NeumannCell;
  m.nx = r.n1 + 1;
  m.ny = r.n2 + 1;
  m.h = grid.h;
  m.x0 = -cell.l1;
  m.y0 = -cell.l2;
  m.active.assign(static_cast<std::size_t>(m.nx) * m.ny, 1);
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i)
      if (r.in_hole(i, j)) m.active[m.node(i, j)] = 0;
  finalize_index(m);
  return m;
}

DomainMask build_strip_mask(const StripSpec& strip, const GridSpec& grid) {
  strip.validate();
  const CellRaster r = rasterize(strip.cell, grid);
  DomainMask m;
  m.kind = MaskKind::Strip;
  m.nx = r.n1;
  m.ny = strip.rows() * r.n2 + 1;
  m.h = grid.h;
  m.x0 = -strip.cell.l1;
  m.y0 = -strip.rows() * strip.cell.l2;
  m.wrap1 = true;
  m.active.assign(static_cast<std::size_t>(m.nx) * m.ny, 1);
  for (int j = 0; j < m.ny; ++j) {
    const int row = std::min(j / r.n2, strip.rows() - 1);
    const bool perforated = row < strip.K || row >= strip.K + strip.J;
    for (int i = 0; i < m.nx; ++i) {
      const bool boundary = j == 0 || j == m.ny - 1;
      if (boundary || (perforated && r.in_hole(i, j - row * r.n2))) m.active[m.node(i, j)] = 0;
    }
  }
  finalize_index(m);
  return m;
}

DomainMask build_window_mask(const WindowSpec& window, const GridSpec& grid) {
  window.validate();
  const CellRaster r = rasterize(window.cell, grid);
  DomainMask m;
  m.kind = MaskKind::Window;
  m.nx = window.columns() * r.n1 + 1;
  m.ny = window.rows() * r.n2 + 1;
  m.h = grid.h;
  m.x0 = (2 * window.col_lo - 1) * window.cell.l1;
  m.y0 = (2 * window.row_lo - 1) * window.cell.l2;
  m.active.assign(static_cast<std::size_t>(m.nx) * m.ny, 1);
  for (int j = 0; j < m.ny; ++j) {
    const int row = std::min(j / r.n2, window.rows() - 1);
    for (int i = 0; i < m.nx; ++i) {
      const int col = std::min(i / r.n1, window.columns() - 1);
      const bool boundary = i == 0 || j == 0 || i == m.nx - 1 || j == m.ny - 1;
      const bool filled = window.filled.count({window.col_lo + col, window.row_lo + row}) > 0;
      if (boundary || (!filled && r.in_hole(i - col * r.n1, j - row * r.n2)))
        m.active[m.node(i, j)] = 0;
    }
  }
  finalize_index(m);
  return m;
}

}  // namespace trapwave
