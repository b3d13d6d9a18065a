#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "trapwave/operator.hpp"

namespace trapwave {

struct SolverOptions {
  // Stop when every requested pair has ||A v - lambda v|| <= tolerance * ||A|| ||v||.
  double tolerance = 1e-9;
  int max_restarts = 40;
  // 0 selects k + 2 (room for a doubly degenerate eigenvalue at the edge).
  int block_size = 0;
  // 0 selects max(6 * block, 48).
  int max_basis = 0;
  // Factorization shift; must sit below the spectrum. The operators here are
  // positive semidefinite, so a small negative value works for all of them.
  double shift = -1e-2;
  std::uint64_t seed = 0x7a11ed5eedULL;
  std::size_t dense_cap = 4000;
};

struct EigenPair {
  double value = 0.0;
  // Unit length in the h^2-weighted norm.
  std::vector<Complex> field;
  // ||A v - lambda v|| / (||A|| ||v||).
  double residual = 0.0;
};

// k smallest eigenpairs, ascending, via restarted block Lanczos on
// (A - shift)^{-1} with full reorthogonalization and Rayleigh-Ritz on A.
// Throws SolverFailure when the restart budget runs out.
std::vector<EigenPair> smallest_eigenpairs(const HermitianOperator& op, int k,
                                           const SolverOptions& opts = {});

// Full ascending spectrum from LAPACK; rejects dimensions above `cap`.
std::vector<double> dense_reference(const HermitianOperator& op, std::size_t cap = 4000);

// Groups of indices whose consecutive values agree within `rel` (relative).
std::vector<std::vector<int>> eigenvalue_clusters(std::span<const double> ascending,
                                                  double rel = 1e-8);

// Rotate so the first entry of largest modulus is real and positive.
void fix_phase(std::span<Complex> v);

}  // namespace trapwave
