#include "trapwave/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "trapwave/errors.hpp"

namespace trapwave {

void BlochParameter::validate() const {
  constexpr double pi = std::numbers::pi;
  const double slack = 1e-12;
  if (!(std::abs(theta1) <= pi + slack) || !(std::abs(theta2) <= pi + slack))
    throw InvalidInput("Bloch phases must lie in [-pi, pi]");
}

Complex HermitianOperator::coupling(int row, int col) const {
  const auto first = columns_.begin() + row_offsets_[row];
  const auto last = columns_.begin() + row_offsets_[row + 1];
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return {};
  return values_[static_cast<std::size_t>(it - columns_.begin())];
}

bool HermitianOperator::is_hermitian(double tol) const {
  for (int r = 0; r < dimension(); ++r) {
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      const int c = columns_[k];
      if (std::abs(values_[k] - std::conj(coupling(c, r))) > tol) return false;
    }
  }
  return true;
}

bool HermitianOperator::is_real() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const Complex& z) { return z.imag() == 0.0; });
}

double HermitianOperator::norm_bound() const {
  double best = 0.0;
  for (int r = 0; r < dimension(); ++r) {
    double s = 0.0;
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) s += std::abs(values_[k]);
    best = std::max(best, s);
  }
  return best;
}

void HermitianOperator::apply(std::span<const Complex> x, std::span<Complex> y) const {
  const auto n = static_cast<std::size_t>(dimension());
  if (x.size() != n || y.size() != n) throw InvalidInput("matvec: vector length does not match operator dimension");
  for (int r = 0; r < dimension(); ++r) {
    Complex s{};
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) s += values_[k] * x[columns_[k]];
    y[r] = s;
  }
}

HermitianOperator assemble(const DomainMask& mask, const BlochParameter& bloch,
                           const OuterBoundary& outer) {
  bloch.validate();
  if (mask.wrap1 && (outer.left == BoundaryKind::Neumann || outer.right == BoundaryKind::Neumann))
    throw InvalidInput("Neumann closure requested on a periodic x1 side");
  if (mask.wrap2 && (outer.bottom == BoundaryKind::Neumann || outer.top == BoundaryKind::Neumann))
    throw InvalidInput("Neumann closure requested on a periodic x2 side");

  const double inv_h2 = 1.0 / (mask.h * mask.h);
  const Complex phase1 = std::polar(1.0, bloch.theta1);
  const Complex phase2 = std::polar(1.0, bloch.theta2);

  // Node weight of the reflected stencil: 1/2 per Neumann side the node sits on.
  auto weight = [&](int i, int j) {
    double w = 1.0;
    if (!mask.wrap1 && ((i == 0 && outer.left == BoundaryKind::Neumann) ||
                        (i == mask.nx - 1 && outer.right == BoundaryKind::Neumann)))
      w *= 0.5;
    if (!mask.wrap2 && ((j == 0 && outer.bottom == BoundaryKind::Neumann) ||
                        (j == mask.ny - 1 && outer.top == BoundaryKind::Neumann)))
      w *= 0.5;
    return w;
  };

  HermitianOperator op;
  op.h_ = mask.h;
  const int n = mask.active_count();
  op.row_offsets_.assign(1, 0);
  op.row_offsets_.reserve(static_cast<std::size_t>(n) + 1);
  op.columns_.reserve(static_cast<std::size_t>(n) * 5);
  op.values_.reserve(static_cast<std::size_t>(n) * 5);

  std::vector<std::pair<int, Complex>> row;
  for (int u = 0; u < n; ++u) {
    const int node = mask.node_of_unknown[u];
    const int i = node % mask.nx;
    const int j = node / mask.nx;
    const double wu = weight(i, j);
    row.clear();
    row.emplace_back(u, Complex(4.0 * inv_h2));

    struct Step { int di, dj; };
    for (const Step s : {Step{1, 0}, Step{-1, 0}, Step{0, 1}, Step{0, -1}}) {
      int ni = i + s.di;
      int nj = j + s.dj;
      Complex factor = 1.0;
      if (ni < 0 || ni >= mask.nx) {
        if (mask.wrap1) {
          factor *= s.di > 0 ? phase1 : std::conj(phase1);
          ni = (ni + mask.nx) % mask.nx;
        } else if ((s.di < 0 ? outer.left : outer.right) == BoundaryKind::Neumann) {
          ni = i - s.di;
        } else {
          continue;
        }
      }
      if (nj < 0 || nj >= mask.ny) {
        if (mask.wrap2) {
          factor *= s.dj > 0 ? phase2 : std::conj(phase2);
          nj = (nj + mask.ny) % mask.ny;
        } else if ((s.dj < 0 ? outer.bottom : outer.top) == BoundaryKind::Neumann) {
          nj = j - s.dj;
        } else {
          continue;
        }
      }
      const int v = mask.unknown(ni, nj);
      if (v < 0) continue;
      const double scale = std::sqrt(wu / weight(ni, nj));
      row.emplace_back(v, -factor * scale * inv_h2);
    }

    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (!op.columns_.empty() && static_cast<int>(op.columns_.size()) > op.row_offsets_.back() &&
          op.columns_.back() == row[k].first) {
        op.values_.back() += row[k].second;
      } else {
        op.columns_.push_back(row[k].first);
        op.values_.push_back(row[k].second);
      }
    }
    op.row_offsets_.push_back(static_cast<int>(op.columns_.size()));
  }
  return op;
}

std::vector<Complex> matvec(const HermitianOperator& op, std::span<const Complex> v) {
  std::vector<Complex> y(v.size());
  op.apply(v, y);
  return y;
}

Complex weighted_dot(std::span<const Complex> a, std::span<const Complex> b, double h) {
  if (a.size() != b.size()) throw InvalidInput("weighted_dot: length mismatch");
  Complex s{};
  for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
  return s * (h * h);
}

double weighted_norm_sq(std::span<const Complex> a, double h) {
  double s = 0.0;
  for (const Complex& z : a) s += std::norm(z);
  return s * h * h;
}

}  // namespace trapwave
