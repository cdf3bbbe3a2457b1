#pragma once

// Hand-rolled generators and independent oracles shared by the test suites.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "skr/sparse.hpp"

namespace skr::test {

/// The 2x2-interior-grid Laplacian with stencil (1, 1, -4, 1, 1).
inline DenseMatrix laplacian_4x4() {
  DenseMatrix m(4, 4);
  m << -4, 1, 1, 0,
        1, -4, 0, 1,
        1, 0, -4, 1,
        0, 1, 1, -4;
  return m;
}

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  double normal() { return std::normal_distribution<double>()(rng); }
  Index integer(Index lo, Index hi) {
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
  }
  Vector vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = uniform();
    return v;
  }
  DenseMatrix matrix(Index r, Index c) {
    DenseMatrix m(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }

  /// Random sparse matrix with `per_row` off-diagonal entries per row and a
  /// diagonal that dominates by `dominance` (nonsymmetric).
  CsrMatrix sparse(Index n, Index per_row, double dominance = 1.5) {
    std::vector<Triplet> t;
    for (Index i = 0; i < n; ++i) {
      double rowsum = 0.0;
      for (Index q = 0; q < per_row; ++q) {
        const Index j = integer(0, n - 1);
        if (j == i) continue;
        const double v = uniform();
        rowsum += std::abs(v);
        t.push_back({i, j, v});
      }
      t.push_back({i, i, (dominance * rowsum + 0.5) * (uniform() < 0 ? -1.0 : 1.0)});
    }
    return assemble_csr(t, n, n);
  }

  /// Symmetric positive definite sparse matrix (diagonally dominant).
  CsrMatrix spd(Index n, Index per_row) {
    std::vector<Triplet> t;
    Vector rows = Vector::Zero(n);
    for (Index i = 0; i < n; ++i)
      for (Index q = 0; q < per_row; ++q) {
        const Index j = integer(0, n - 1);
        if (j == i) continue;
        const double v = uniform();
        t.push_back({i, j, v});
        t.push_back({j, i, v});
        rows[i] += std::abs(v);
        rows[j] += std::abs(v);
      }
    for (Index i = 0; i < n; ++i) t.push_back({i, i, rows[i] + 1.0});
    return assemble_csr(t, n, n);
  }

  /// Tridiagonal, nonsymmetric, diagonally dominant.
  CsrMatrix tridiagonal(Index n) {
    std::vector<Triplet> t;
    for (Index i = 0; i < n; ++i) {
      t.push_back({i, i, 4.0 + uniform(0.0, 1.0)});
      if (i > 0) t.push_back({i, i - 1, uniform()});
      if (i + 1 < n) t.push_back({i, i + 1, uniform()});
    }
    return assemble_csr(t, n, n);
  }
};

/// Dense direct solve (partial-pivot LU).
inline Vector dense_solve(const CsrMatrix& a, const Vector& b) {
  return a.to_dense().partialPivLu().solve(b);
}

/// Sparse direct solve through Eigen's SparseLU.
inline Vector sparse_solve(const CsrMatrix& a, const Vector& b) {
  std::vector<Eigen::Triplet<double>> t;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
      t.emplace_back(i, a.col_idx()[p], a.values()[p]);
  Eigen::SparseMatrix<double> s(a.rows(), a.cols());
  s.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(s);
  return lu.solve(b);
}

/// Sine of the largest principal angle from span(Q) into span(C), from the
/// singular values of C^T Q (both orthonormal).
inline double principal_angle_sine(const DenseMatrix& q, const DenseMatrix& c) {
  Eigen::JacobiSVD<DenseMatrix> svd(c.transpose() * q);
  const double cmin = svd.singularValues().minCoeff();
  return std::sqrt(std::max(0.0, 1.0 - cmin * cmin));
}

inline DenseMatrix orthonormal_columns(const DenseMatrix& m) {
  Eigen::HouseholderQR<DenseMatrix> qr(m);
  return qr.householderQ() * DenseMatrix::Identity(m.rows(), m.cols());
}

}  // namespace skr::test
