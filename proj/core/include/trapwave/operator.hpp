#pragma once

#include <complex>
#include <span>
#include <vector>

#include "trapwave/geometry.hpp"

namespace trapwave {

using Complex = std::complex<double>;

// Bloch phases per full period: a field picks up e^{i theta_j} when shifted
// by +2 l_j. The Floquet wave number is eta_j = theta_j / (2 l_j).
struct BlochParameter {
  double theta1 = 0.0;
  double theta2 = 0.0;

  void validate() const;
  BlochParameter conjugate() const { return {-theta1, -theta2}; }
  friend bool operator==(const BlochParameter&, const BlochParameter&) = default;
};

enum class BoundaryKind { Dirichlet, Neumann };

// Closure on the outer sides of a non-periodic mask. Ignored along wrapped
// directions, except that asking for Neumann there is an error.
struct OuterBoundary {
  BoundaryKind left = BoundaryKind::Dirichlet;
  BoundaryKind right = BoundaryKind::Dirichlet;
  BoundaryKind bottom = BoundaryKind::Dirichlet;
  BoundaryKind top = BoundaryKind::Dirichlet;

  static OuterBoundary all(BoundaryKind k) { return {k, k, k, k}; }
};

// Discrete -Laplacian over the active nodes of a mask, stored as CSR with
// sorted columns. Diagonal entries are 4/h^2; couplings are -1/h^2 times the
// Bloch phase on wrapped edges. Neumann sides use ghost reflection followed by
// the diagonal similarity that makes the reflected stencil Hermitian.
class HermitianOperator {
 public:
  HermitianOperator() = default;

  int dimension() const { return static_cast<int>(row_offsets_.size()) - 1; }
  double spacing() const { return h_; }
  std::span<const int> row_offsets() const { return row_offsets_; }
  std::span<const int> columns() const { return columns_; }
  std::span<const Complex> values() const { return values_; }

  Complex coupling(int row, int col) const;
  bool is_hermitian(double tol = 0.0) const;
  bool is_real() const;
  // Max absolute row sum; an upper bound for the spectral radius.
  double norm_bound() const;

  // y = A x, fixed traversal order.
  void apply(std::span<const Complex> x, std::span<Complex> y) const;

 private:
  friend HermitianOperator assemble(const DomainMask&, const BlochParameter&, const OuterBoundary&);

  double h_ = 0.0;
  std::vector<int> row_offsets_{0};
  std::vector<int> columns_;
  std::vector<Complex> values_;
};

HermitianOperator assemble(const DomainMask& mask, const BlochParameter& bloch,
                           const OuterBoundary& outer = {});

std::vector<Complex> matvec(const HermitianOperator& op, std::span<const Complex> v);

// Grid-weighted inner product h^2 sum conj(a_k) b_k, the discrete L2 pairing.
Complex weighted_dot(std::span<const Complex> a, std::span<const Complex> b, double h);
double weighted_norm_sq(std::span<const Complex> a, double h);

}  // namespace trapwave
