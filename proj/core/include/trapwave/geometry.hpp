#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace trapwave {

// Axis-aligned open rectangle (x1min, x1max) x (x2min, x2max).
struct Hole {
  double x1min = 0.0;
  double x1max = 0.0;
  double x2min = 0.0;
  double x2max = 0.0;

  friend bool operator==(const Hole&, const Hole&) = default;
};

// Periodicity cell (-l1, l1) x (-l2, l2), optionally with one rectangular hole
// whose closure sits strictly inside.
struct CellSpec {
  double l1 = 1.0;
  double l2 = 1.0;
  std::optional<Hole> hole;

  void validate() const;
  friend bool operator==(const CellSpec&, const CellSpec&) = default;
};

struct GridSpec {
  double h = 0.125;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// A cell laid onto a grid: node counts per period and the closed hole as an
// inclusive range of local node indices (local index 0 sits at x = -l).
struct CellRaster {
  int n1 = 0;
  int n2 = 0;
  bool has_hole = false;
  int hole_i0 = 0, hole_i1 = -1;
  int hole_j0 = 0, hole_j1 = -1;

  bool in_hole(int i, int j) const {
    return has_hole && i >= hole_i0 && i <= hole_i1 && j >= hole_j0 && j <= hole_j1;
  }
  int hole_node_count() const {
    return has_hole ? (hole_i1 - hole_i0 + 1) * (hole_j1 - hole_j0 + 1) : 0;
  }
};

// Throws InvalidInput when 2l/h is not an integer >= 4 or a hole edge misses
// the grid lines.
CellRaster rasterize(const CellSpec& cell, const GridSpec& grid);

// One cell column: K perforated cells, J filled cells, K perforated cells,
// stacked along x2 and centred on the filled block.
struct StripSpec {
  CellSpec cell;
  int J = 1;
  int K = 2;

  void validate() const;
  int rows() const { return 2 * K + J; }
  friend bool operator==(const StripSpec&, const StripSpec&) = default;
};

struct CellIndex {
  int a1 = 0;
  int a2 = 0;
  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

// Finite block of cells alpha1 in [col_lo, col_hi], alpha2 in [row_lo, row_hi];
// cell alpha is centred at (2 alpha1 l1, 2 alpha2 l2). Cells listed in
// `filled` carry no hole.
struct WindowSpec {
  CellSpec cell;
  int col_lo = 0, col_hi = 0;
  int row_lo = 0, row_hi = 0;
  std::set<CellIndex> filled;

  void validate() const;
  int columns() const { return col_hi - col_lo + 1; }
  int rows() const { return row_hi - row_lo + 1; }
  bool contains(CellIndex c) const {
    return c.a1 >= col_lo && c.a1 <= col_hi && c.a2 >= row_lo && c.a2 <= row_hi;
  }
};

enum class MaskKind : std::uint8_t { PeriodicCell, NeumannCell, Strip, Window };

// Node-level domain. Node (i, j) sits at (x0 + i h, y0 + j h); storage is
// row-major with j as the slow index. Inactive nodes carry the Dirichlet value
// zero and are not unknowns.
struct DomainMask {
  MaskKind kind = MaskKind::PeriodicCell;
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
  bool wrap1 = false;
  bool wrap2 = false;
  std::vector<std::uint8_t> active;
  // node -> unknown index (-1 when inactive), and the inverse map. Unknowns
  // are numbered row-major over active nodes.
  std::vector<int> unknown_of_node;
  std::vector<int> node_of_unknown;

  int node(int i, int j) const { return j * nx + i; }
  bool is_active(int i, int j) const { return active[node(i, j)] != 0; }
  int unknown(int i, int j) const { return unknown_of_node[node(i, j)]; }
  int active_count() const { return static_cast<int>(node_of_unknown.size()); }
  double x(int i) const { return x0 + i * h; }
  double y(int j) const { return y0 + j * h; }

  friend bool operator==(const DomainMask&, const DomainMask&) = default;
};

// Doubly periodic cell: n1 x n2 nodes starting at (-l1, -l2); the closed hole
// is eliminated.
DomainMask build_cell_mask(const CellSpec& cell, const GridSpec& grid);

// Cell with Neumann outer sides: (n1+1) x (n2+1) nodes covering the closed
// square, outer nodes active, closed hole eliminated.
DomainMask build_neumann_cell_mask(const CellSpec& cell, const GridSpec& grid);

// Truncated perforated strip, periodic in x1, Dirichlet rows at both x2 ends.
// The x2 origin sits on the midline of the filled block.
DomainMask build_strip_mask(const StripSpec& strip, const GridSpec& grid);

// Non-periodic window with its whole outer boundary eliminated.
DomainMask build_window_mask(const WindowSpec& window, const GridSpec& grid);

}  // namespace trapwave
