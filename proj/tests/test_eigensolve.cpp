#include <gtest/gtest.h>

#include "support.hpp"
#include "trapwave/eigensolve.hpp"
#include "trapwave/errors.hpp"

using namespace trapwave;
using namespace tw_test;

namespace {

// Oracle check: Lanczos head against the dense spectrum, relative.
void expect_matches_dense(const HermitianOperator& a, int k, double rel) {
  const auto dense = dense_reference(a);
  const auto pairs = smallest_eigenpairs(a, k);
  ASSERT_EQ(static_cast<int>(pairs.size()), k);
  for (int i = 0; i < k; ++i)
    EXPECT_LE(std::abs(pairs[i].value - dense[i]), rel * std::max(1.0, std::abs(dense[i]))) << "index " << i;
}

}  // namespace

TEST(Lanczos, DirichletUnitSquare) {
  WindowSpec w;
  w.cell = plain_cell(0.5);
  const double h = 1.0 / 32.0;
  const auto pairs = smallest_eigenpairs(assemble(build_window_mask(w, GridSpec{h}), {}), 1);
  const double discrete = 8.0 / (h * h) * std::pow(std::sin(pi * h / 2.0), 2);
  EXPECT_NEAR(pairs[0].value, discrete, 1e-10 * discrete);
  EXPECT_NEAR(discrete, 19.723, 1e-3);
  EXPECT_LT(std::abs(pairs[0].value - 2 * pi * pi), 0.02);
}

TEST(Lanczos, PeriodicGroundStateIsConstant) {
  const auto pairs = smallest_eigenpairs(assemble(build_cell_mask(plain_cell(), GridSpec{0.25}), {}), 1);
  EXPECT_NEAR(pairs[0].value, 0.0, 1e-10);
  const Complex first = pairs[0].field.front();
  for (const Complex& z : pairs[0].field) EXPECT_NEAR(std::abs(z - first), 0.0, 1e-8);
}

TEST(Lanczos, ReferenceCellAgainstDense) {
  const HermitianOperator a = assemble(build_cell_mask(ref1_cell(), ref_grid()), {});
  EXPECT_EQ(a.dimension(), 175);
  expect_matches_dense(a, 1, 1e-10);
  expect_matches_dense(a, 6, 1e-10);
}

TEST(Lanczos, OracleEquivalenceOnSmallMasks) {
  std::mt19937_64 rng(2024);
  std::vector<DomainMask> masks{build_cell_mask(ref1_cell(), ref_grid()),
                                build_cell_mask(plain_cell(), GridSpec{0.25}),
                                build_strip_mask(StripSpec{ref1_cell(), 1, 2}, GridSpec{0.25})};
  for (const DomainMask& m : masks)
    for (int t = 0; t < 20; ++t) {
      const BlochParameter b{random_phase(rng), m.wrap2 ? random_phase(rng) : 0.0};
      expect_matches_dense(assemble(m, b), 6, 1e-9);
    }
}

TEST(Lanczos, PairsAreNormalisedWithSmallResiduals) {
  const HermitianOperator a = assemble(build_cell_mask(ref1_cell(), ref_grid()), {0.5, -2.0});
  for (const EigenPair& p : smallest_eigenpairs(a, 4)) {
    EXPECT_LE(p.residual, 1e-9);
    EXPECT_NEAR(weighted_norm_sq(p.field, a.spacing()), 1.0, 1e-12);
    const auto av = matvec(a, p.field);
    double r = 0.0;
    for (std::size_t k = 0; k < av.size(); ++k) r += std::norm(av[k] - p.value * p.field[k]);
    EXPECT_LE(std::sqrt(r * a.spacing() * a.spacing()), 1e-8 * a.norm_bound());
  }
}

TEST(Lanczos, ValuesAscending) {
  const auto pairs = smallest_eigenpairs(assemble(build_cell_mask(ref1_cell(), ref_grid()), {1.0, 1.0}), 6);
  for (std::size_t i = 1; i < pairs.size(); ++i) EXPECT_LE(pairs[i - 1].value, pairs[i].value);
}

TEST(Lanczos, DegenerateClusterResolved) {
  // (pi, pi) on the plain torus: the lowest level is fourfold.
  const HermitianOperator a = assemble(build_cell_mask(plain_cell(), GridSpec{0.25}), {pi, pi});
  const auto pairs = smallest_eigenpairs(a, 4);
  std::vector<double> v;
  for (const auto& p : pairs) v.push_back(p.value);
  EXPECT_EQ(eigenvalue_clusters(v).size(), 1u);
  expect_matches_dense(a, 4, 1e-10);
}

TEST(Lanczos, BadCountIsRejected) {
  const HermitianOperator a = assemble(build_cell_mask(plain_cell(), GridSpec{0.25}), {});
  EXPECT_THROW(smallest_eigenpairs(a, 0), InvalidInput);
  EXPECT_THROW(smallest_eigenpairs(a, a.dimension()), InvalidInput);
}

TEST(Lanczos, ExhaustedBudgetFailsLoudly) {
  SolverOptions o;
  o.tolerance = 1e-300;
  o.max_restarts = 2;
  o.max_basis = 12;
  const HermitianOperator a = assemble(build_cell_mask(ref1_cell(), ref_grid()), {0.3, 0.1});
  EXPECT_THROW(smallest_eigenpairs(a, 2, o), SolverFailure);
}

TEST(Lanczos, RepeatRunsAreBitIdentical) {
  const HermitianOperator a = assemble(build_cell_mask(ref1_cell(), ref_grid()), {0.3, 0.1});
  const auto p1 = smallest_eigenpairs(a, 3);
  const auto p2 = smallest_eigenpairs(a, 3);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(p1[i].value, p2[i].value);
    EXPECT_EQ(p1[i].field, p2[i].field);
  }
}

TEST(Lanczos, PunchingAHoleRaisesTheGroundState) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 5; ++t) {
    const BlochParameter b{random_phase(rng), random_phase(rng)};
    const double plain = smallest_eigenpairs(assemble(build_cell_mask(plain_cell(), ref_grid()), b), 1)[0].value;
    const double holed = smallest_eigenpairs(assemble(build_cell_mask(ref1_cell(), ref_grid()), b), 1)[0].value;
    EXPECT_GE(holed, plain);
  }
}

TEST(Lanczos, GroundStateLipschitzInPhase) {
  const DomainMask m = build_cell_mask(ref1_cell(), ref_grid());
  const double delta = 0.05;
  double worst = 0.0;
  for (double t = -pi; t + delta <= pi; t += 0.5) {
    const double a = smallest_eigenpairs(assemble(m, {t, 0.0}), 1)[0].value;
    const double b = smallest_eigenpairs(assemble(m, {t + delta, 0.0}), 1)[0].value;
    worst = std::max(worst, std::abs(a - b) / delta);
  }
  RecordProperty("lipschitz_constant", std::to_string(worst));
  EXPECT_LT(worst, 5.0);
}

TEST(Dense, CapIsEnforced) {
  const HermitianOperator a = assemble(build_cell_mask(ref1_cell(), ref_grid()), {});
  EXPECT_THROW(dense_reference(a, 100), InvalidInput);
}

TEST(Dense, ConjugatePhases) {
  const DomainMask m = build_cell_mask(ref1_cell(), ref_grid());
  const auto a = dense_reference(assemble(m, {0.9, -0.4}));
  const auto b = dense_reference(assemble(m, {-0.9, 0.4}));
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
}

TEST(Clusters, GroupsWithinRelativeTolerance) {
  const std::vector<double> v{1.0, 1.0 + 1e-10, 2.0, 3.0, 3.0 * (1 + 5e-9)};
  const auto c = eigenvalue_clusters(v);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], (std::vector<int>{0, 1}));
  EXPECT_EQ(c[1], (std::vector<int>{2}));
  EXPECT_EQ(c[2], (std::vector<int>{3, 4}));
}

TEST(Phase, LargestEntryBecomesRealPositive) {
  std::vector<Complex> v{{0.1, 0.2}, {0.0, -3.0}, {1.0, 1.0}};
  fix_phase(v);
  EXPECT_EQ(v[1].imag(), 0.0);
  EXPECT_NEAR(v[1].real(), 3.0, 1e-15);
}
