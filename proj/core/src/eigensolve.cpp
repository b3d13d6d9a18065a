#include "trapwave/eigensolve.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "trapwave/errors.hpp"

namespace trapwave {
namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// (A - shift I)^{-1} applied column by column. Real operators get a real
// factorization and solve real and imaginary parts separately.
class ShiftedInverse {
 public:
  ShiftedInverse(const HermitianOperator& op, double shift) : real_(op.is_real()) {
    const int n = op.dimension();
    const auto offs = op.row_offsets();
    const auto cols = op.columns();
    const auto vals = op.values();
    if (real_) {
      std::vector<Eigen::Triplet<double>> t;
      t.reserve(vals.size());
      for (int r = 0; r < n; ++r)
        for (int k = offs[r]; k < offs[r + 1]; ++k)
          if (cols[k] >= r) t.emplace_back(cols[k], r, vals[k].real() - (cols[k] == r ? shift : 0.0));
      Eigen::SparseMatrix<double> m(n, n);
      m.setFromTriplets(t.begin(), t.end());
      rfac_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(m);
      if (rfac_->info() != Eigen::Success) throw SolverFailure("sparse LDL^T factorization failed");
    } else {
      // Lower triangle of A: entry (c, r) for c >= r is conj(A(r, c)).
      std::vector<Eigen::Triplet<Complex>> t;
      t.reserve(vals.size());
      for (int r = 0; r < n; ++r)
        for (int k = offs[r]; k < offs[r + 1]; ++k)
          if (cols[k] >= r)
            t.emplace_back(cols[k], r, std::conj(vals[k]) - (cols[k] == r ? Complex(shift) : Complex{}));
      Eigen::SparseMatrix<Complex> m(n, n);
      m.setFromTriplets(t.begin(), t.end());
      cfac_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<Complex>>>(m);
      if (cfac_->info() != Eigen::Success) throw SolverFailure("sparse LDL^H factorization failed");
    }
  }

  MatrixXcd solve(const MatrixXcd& rhs) const {
    if (!real_) return cfac_->solve(rhs);
    const Eigen::MatrixXd re = rfac_->solve(Eigen::MatrixXd(rhs.real()));
    const Eigen::MatrixXd im = rfac_->solve(Eigen::MatrixXd(rhs.imag()));
    MatrixXcd out(rhs.rows(), rhs.cols());
    out.real() = re;
    out.imag() = im;
    return out;
  }

 private:
  bool real_;
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> rfac_;
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<Complex>>> cfac_;
};

MatrixXcd apply_block(const HermitianOperator& op, const MatrixXcd& x) {
  MatrixXcd y(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    op.apply(std::span<const Complex>(x.col(c).data(), static_cast<std::size_t>(x.rows())),
             std::span<Complex>(y.col(c).data(), static_cast<std::size_t>(y.rows())));
  return y;
}

// Deterministic start block; real when the operator is real so the whole
// Krylov space stays real.
MatrixXcd start_block(int n, int p, bool real, std::uint64_t seed) {
  std::uint64_t s = seed;
  auto next = [&s]() {
    // splitmix64
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  };
  MatrixXcd x(n, p);
  for (int c = 0; c < p; ++c)
    for (int r = 0; r < n; ++r) {
      const double re = next();
      x(r, c) = real ? Complex(re, 0.0) : Complex(re, next());
    }
  return x;
}

// Orthonormalize the columns of y against basis(:, 0:m) and each other.
// Columns that collapse are dropped. Returns the accepted columns.
MatrixXcd orthonormalize(const MatrixXcd& basis, Eigen::Index m, MatrixXcd y) {
  for (int pass = 0; pass < 2 && m > 0; ++pass) {
    const auto q = basis.leftCols(m);
    y -= q * (q.adjoint() * y);
  }
  MatrixXcd out(y.rows(), y.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    VectorXcd v = y.col(c);
    const double before = v.norm();
    if (before == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (m > 0) v -= basis.leftCols(m) * (basis.leftCols(m).adjoint() * v);
      if (kept > 0) v -= out.leftCols(kept) * (out.leftCols(kept).adjoint() * v);
    }
    const double after = v.norm();
    if (after <= 1e-10 * before) continue;
    out.col(kept++) = v / after;
  }
  return out.leftCols(kept);
}

}  // namespace

void fix_phase(std::span<Complex> v) {
  std::size_t best = 0;
  double mag = -1.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (std::abs(v[k]) > mag * (1.0 + 1e-12)) {
      mag = std::abs(v[k]);
      best = k;
    }
  }
  if (mag <= 0.0) return;
  const Complex rot = std::conj(v[best]) / mag;
  for (Complex& z : v) z *= rot;
  v[best] = Complex(v[best].real(), 0.0);
}

std::vector<EigenPair> smallest_eigenpairs(const HermitianOperator& op, int k,
                                           const SolverOptions& opts) {
  const int n = op.dimension();
  if (k < 1 || k >= n) {
    std::ostringstream os;
    os << "smallest_eigenpairs: need 1 <= k < dimension, got k = " << k << ", dimension = " << n;
    throw InvalidInput(os.str());
  }
  const int p = std::min(n, opts.block_size > 0 ? std::max(opts.block_size, k) : k + 2);
  const int mmax = std::min(n, opts.max_basis > 0 ? std::max(opts.max_basis, 2 * p) : std::max(6 * p, 48));
  const double norm_a = std::max(op.norm_bound(), 1e-300);
  const bool real = op.is_real();

  const ShiftedInverse inverse(op, opts.shift);
  MatrixXcd block = start_block(n, p, real, opts.seed);
  MatrixXcd basis(n, mmax);

  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    Eigen::Index m = 0;
    MatrixXcd current = orthonormalize(basis, 0, block);
    while (current.cols() > 0) {
      const Eigen::Index take = std::min<Eigen::Index>(current.cols(), mmax - m);
      basis.middleCols(m, take) = current.leftCols(take);
      m += take;
      if (m >= mmax) break;
      current = orthonormalize(basis, m, inverse.solve(basis.middleCols(m - take, take)));
    }
    if (m < k) throw SolverFailure("Krylov basis collapsed below the requested eigenpair count");

    const auto q = basis.leftCols(m);
    const MatrixXcd aq = apply_block(op, q);
    MatrixXcd h = q.adjoint() * aq;
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> ritz(h);
    if (ritz.info() != Eigen::Success) throw SolverFailure("Rayleigh-Ritz eigenproblem failed");

    const int keep = std::min<int>(p, static_cast<int>(m));
    const MatrixXcd s = ritz.eigenvectors().leftCols(keep);
    const MatrixXcd x = q * s;
    const MatrixXcd r = aq * s - x * ritz.eigenvalues().head(keep).asDiagonal();

    bool converged = true;
    std::vector<double> residuals(static_cast<std::size_t>(keep));
    for (int c = 0; c < keep; ++c) {
      residuals[c] = r.col(c).norm() / (norm_a * x.col(c).norm());
      if (c < k && !(residuals[c] <= opts.tolerance)) converged = false;
    }
    if (converged || m == n) {
      std::vector<EigenPair> out;
      out.reserve(static_cast<std::size_t>(k));
      const double scale = 1.0 / op.spacing();
      for (int c = 0; c < k; ++c) {
        EigenPair pair;
        pair.value = ritz.eigenvalues()(c);
        pair.residual = residuals[c];
        const VectorXcd v = x.col(c) * (scale / x.col(c).norm());
        pair.field.assign(v.data(), v.data() + v.size());
        if (real)
          for (Complex& z : pair.field) z = Complex(z.real(), 0.0);
        fix_phase(pair.field);
        out.push_back(std::move(pair));
      }
      return out;
    }
    block = x;
  }
  std::ostringstream os;
  os << "smallest_eigenpairs: no convergence to tolerance " << opts.tolerance << " within "
     << opts.max_restarts << " restarts (dimension " << n << ", k = " << k << ")";
  throw SolverFailure(os.str());
}

std::vector<double> dense_reference(const HermitianOperator& op, std::size_t cap) {
  const int n = op.dimension();
  if (static_cast<std::size_t>(n) > cap) {
    std::ostringstream os;
    os << "dense_reference: dimension " << n << " exceeds the cap " << cap;
    throw InvalidInput(os.str());
  }
  const auto offs = op.row_offsets();
  const auto cols = op.columns();
  const auto vals = op.values();
  std::vector<double> w(static_cast<std::size_t>(n));
  lapack_int info = 0;
  if (op.is_real()) {
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    for (int r = 0; r < n; ++r)
      for (int k = offs[r]; k < offs[r + 1]; ++k) a[static_cast<std::size_t>(cols[k]) * n + r] = vals[k].real();
    info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
  } else {
    std::vector<lapack_complex_double> a(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r)
      for (int k = offs[r]; k < offs[r + 1]; ++k)
        a[static_cast<std::size_t>(cols[k]) * n + r] = lapack_make_complex_double(vals[k].real(), vals[k].imag());
    info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
  }
  if (info != 0) throw SolverFailure("dense_reference: LAPACK eigensolver failed, info = " + std::to_string(info));
  return w;
}

std::vector<std::vector<int>> eigenvalue_clusters(std::span<const double> ascending, double rel) {
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < ascending.size(); ++i) {
    const bool joins = i > 0 && std::abs(ascending[i] - ascending[i - 1]) <=
                                    rel * std::max({std::abs(ascending[i]), std::abs(ascending[i - 1]), 1e-12});
    if (!joins) out.emplace_back();
    out.back().push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace trapwave
