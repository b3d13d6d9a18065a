#include <gtest/gtest.h>

#include "support.hpp"
#include "trapwave/errors.hpp"

using namespace trapwave;
using namespace tw_test;

namespace {

int count_active(const DomainMask& m) {
  return static_cast<int>(std::count(m.active.begin(), m.active.end(), std::uint8_t{1}));
}

}  // namespace

TEST(CellMask, PlainCellIsFullyActive) {
  const DomainMask m = build_cell_mask(plain_cell(), GridSpec{0.25});
  EXPECT_EQ(m.nx, 8);
  EXPECT_EQ(m.ny, 8);
  EXPECT_EQ(m.active_count(), 64);
  EXPECT_TRUE(m.wrap1);
  EXPECT_TRUE(m.wrap2);
}

TEST(CellMask, ClosedHoleNodesAreRemoved) {
  const DomainMask m = build_cell_mask(ref1_cell(), GridSpec{0.25});
  EXPECT_EQ(m.active_count(), 64 - 25);
  EXPECT_FALSE(m.is_active(2, 2));  // (-0.5, -0.5), on the hole boundary
  EXPECT_FALSE(m.is_active(4, 4));  // centre
  EXPECT_TRUE(m.is_active(1, 4));
}

TEST(CellMask, ReferenceCellUnknownCount) {
  EXPECT_EQ(build_cell_mask(ref1_cell(), ref_grid()).active_count(), 256 - 81);
}

TEST(CellMask, HoleOffGridIsRejected) {
  EXPECT_THROW(build_cell_mask(ref1_cell(), GridSpec{1.0 / 3.0}), InvalidInput);
}

TEST(CellMask, NonIntegerNodeCountIsRejected) {
  EXPECT_THROW(build_cell_mask(plain_cell(), GridSpec{0.3}), InvalidInput);
  EXPECT_THROW(build_cell_mask(plain_cell(), GridSpec{0.75}), InvalidInput);  // 2l/h < 4
}

TEST(CellSpecCheck, HoleMustSitStrictlyInside) {
  CellSpec c{1.0, 1.0, Hole{-1.0, 0.5, -0.5, 0.5}};
  EXPECT_THROW(c.validate(), InvalidInput);
  c.hole = Hole{0.5, -0.5, -0.5, 0.5};
  EXPECT_THROW(c.validate(), InvalidInput);
  EXPECT_THROW((CellSpec{0.0, 1.0, std::nullopt}.validate()), InvalidInput);
}

TEST(CellMask, MirrorSymmetricForCentredHole) {
  const DomainMask m = build_cell_mask(ref1_cell(), ref_grid());
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i) {
      EXPECT_EQ(m.is_active(i, j), m.is_active(i, (m.ny - j) % m.ny));
      EXPECT_EQ(m.is_active(i, j), m.is_active((m.nx - i) % m.nx, j));
    }
}

TEST(StripMask, OneFilledRowTwoPerforated) {
  const StripSpec s{ref1_cell(), 1, 2};
  const DomainMask m = build_strip_mask(s, GridSpec{0.25});
  EXPECT_EQ(m.nx, 8);
  EXPECT_EQ(m.ny, 41);  // 5 cells of 8 nodes plus the closing Dirichlet row
  EXPECT_TRUE(m.wrap1);
  EXPECT_FALSE(m.wrap2);
  for (int i = 0; i < m.nx; ++i) {
    EXPECT_FALSE(m.is_active(i, 0));
    EXPECT_FALSE(m.is_active(i, m.ny - 1));
  }
  EXPECT_EQ(m.active_count(), 8 * 41 - 2 * 8 - 4 * 25);
  // the middle cell (rows 16..23) has no hole
  for (int j = 16; j < 24; ++j)
    for (int i = 0; i < m.nx; ++i) EXPECT_TRUE(m.is_active(i, j));
}

TEST(StripMask, TwoFilledRows) {
  const StripSpec s{ref1_cell(), 2, 2};
  const DomainMask m = build_strip_mask(s, GridSpec{0.25});
  EXPECT_EQ(m.ny, 49);
  EXPECT_EQ(m.active_count(), 8 * 49 - 2 * 8 - 4 * 25);
  for (int j = 16; j < 32; ++j)
    for (int i = 0; i < m.nx; ++i) EXPECT_TRUE(m.is_active(i, j));
}

TEST(StripMask, TruncationBelowTwoCellsIsRejected) {
  EXPECT_THROW(build_strip_mask(StripSpec{ref1_cell(), 1, 1}, GridSpec{0.25}), InvalidInput);
  EXPECT_THROW(build_strip_mask(StripSpec{ref1_cell(), 0, 3}, GridSpec{0.25}), InvalidInput);
}

TEST(StripMask, SymmetricAboutTheFilledBlockMidline) {
  for (int J : {1, 2, 3}) {
    const DomainMask m = build_strip_mask(StripSpec{ref1_cell(), J, 3}, GridSpec{0.25});
    for (int j = 0; j < m.ny; ++j)
      for (int i = 0; i < m.nx; ++i) ASSERT_EQ(m.is_active(i, j), m.is_active(i, m.ny - 1 - j)) << J;
    EXPECT_NEAR(m.y((m.ny - 1) / 2), 0.0, 1e-14);
  }
}

TEST(WindowMask, SingleCellMatchesCellInterior) {
  WindowSpec w;
  w.cell = ref1_cell();
  const GridSpec g{0.125};
  const DomainMask win = build_window_mask(w, g);
  const DomainMask cell = build_cell_mask(w.cell, g);
  EXPECT_EQ(win.nx, cell.nx + 1);
  EXPECT_FALSE(win.wrap1 || win.wrap2);
  for (int j = 0; j < win.ny; ++j)
    for (int i = 0; i < win.nx; ++i) {
      const bool boundary = i == 0 || j == 0 || i == win.nx - 1 || j == win.ny - 1;
      if (boundary)
        EXPECT_FALSE(win.is_active(i, j));
      else
        EXPECT_EQ(win.is_active(i, j), cell.is_active(i, j));
    }
}

TEST(WindowMask, FilledBlockRemovesItsHoles) {
  WindowSpec w;
  w.cell = ref1_cell();
  w.col_lo = w.row_lo = 0;
  w.col_hi = w.row_hi = 3;
  w.filled = {{1, 1}, {1, 2}, {2, 1}, {2, 2}};
  const GridSpec g{0.25};
  const DomainMask m = build_window_mask(w, g);
  const int boundary = 2 * m.nx + 2 * (m.ny - 2);
  const int holes = (m.nx * m.ny - boundary - m.active_count()) / 25;
  EXPECT_EQ(holes, 12);
  EXPECT_EQ(m.nx * m.ny - boundary - m.active_count(), 12 * 25);
}

TEST(WindowMask, FilledCellOutsideIsRejected) {
  WindowSpec w;
  w.cell = ref1_cell();
  w.filled = {{3, 0}};
  EXPECT_THROW(w.validate(), InvalidInput);
  WindowSpec empty;
  empty.cell = ref1_cell();
  empty.col_lo = 2;
  empty.col_hi = 1;
  EXPECT_THROW(empty.validate(), InvalidInput);
}

TEST(WindowMask, PerforatedSampleCount) {
  WindowSpec w;
  w.cell = ref1_cell();
  w.col_lo = w.row_lo = -3;
  w.col_hi = w.row_hi = 2;
  const DomainMask m = build_window_mask(w, GridSpec{0.25});
  EXPECT_EQ(m.nx, 49);
  EXPECT_EQ(m.active_count(), 47 * 47 - 36 * 25);
}

TEST(Masks, ActiveCountIsTotalMinusHolesMinusBoundary) {
  std::mt19937_64 rng(7);
  const double hs[] = {0.25, 0.125};
  for (int trial = 0; trial < 20; ++trial) {
    const double h = hs[trial % 2];
    const int half = 1 + static_cast<int>(rng() % 2);  // hole half-width in grid steps of 0.25
    const CellSpec c{1.0, 1.0, Hole{-0.25 * half, 0.25 * half, -0.25, 0.25 * half}};
    const CellRaster r = rasterize(c, GridSpec{h});
    const int J = 1 + static_cast<int>(rng() % 3), K = 2 + static_cast<int>(rng() % 2);
    const DomainMask s = build_strip_mask(StripSpec{c, J, K}, GridSpec{h});
    EXPECT_EQ(s.active_count(), s.nx * s.ny - 2 * K * r.hole_node_count() - 2 * s.nx);
    EXPECT_EQ(count_active(s), s.active_count());
    const DomainMask cm = build_cell_mask(c, GridSpec{h});
    EXPECT_EQ(cm.active_count(), cm.nx * cm.ny - r.hole_node_count());
  }
}

TEST(Masks, RebuildIsIdentical) {
  const StripSpec s = ref2_strip();
  EXPECT_TRUE(build_strip_mask(s, ref_grid()) == build_strip_mask(s, ref_grid()));
  EXPECT_TRUE(build_cell_mask(s.cell, ref_grid()) == build_cell_mask(s.cell, ref_grid()));
}

TEST(Masks, UnknownNumberingIsRowMajor) {
  const DomainMask m = build_strip_mask(StripSpec{ref1_cell(), 1, 2}, GridSpec{0.25});
  for (int u = 1; u < m.active_count(); ++u) EXPECT_LT(m.node_of_unknown[u - 1], m.node_of_unknown[u]);
  for (int u = 0; u < m.active_count(); ++u) EXPECT_EQ(m.unknown_of_node[m.node_of_unknown[u]], u);
}
