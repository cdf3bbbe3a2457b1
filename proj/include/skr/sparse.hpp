#pragma once

/// \file skr/sparse.hpp
/// \brief CSR matrix, dense vector aliases and the level-1/level-2 kernels
///        every solver is built on.
///
/// Kernels come in two flavours: the default ones in namespace `skr` are
/// OpenMP-parallel over rows/entries; `skr::serial` holds the plain loop
/// reference versions kept for testing and benchmarking.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace skr {

using Index = std::int64_t;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

/// Thrown on any size mismatch between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Compressed sparse row matrix, real double precision.
///
/// Immutable after construction; column indices are strictly increasing
/// within each row and every stored value is finite.
class CsrMatrix {
 public:
  CsrMatrix() = default;

  /// Takes ownership of already-canonical CSR arrays; validates invariants.
  CsrMatrix(Index n_rows, Index n_cols, std::vector<Index> row_ptr,
            std::vector<Index> col_idx, std::vector<double> values);

  Index rows() const { return n_rows_; }
  Index cols() const { return n_cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }

  std::span<const Index> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  /// Stored value at (i, j), 0 if not in the pattern.
  double coeff(Index i, Index j) const;
  /// Position of (i, j) inside values(), or -1.
  Index find(Index i, Index j) const;

  std::vector<Triplet> to_triplets() const;
  DenseMatrix to_dense() const;
  CsrMatrix transpose() const;

  /// Diagonal entries (0 where absent).
  Vector diagonal() const;

  double frobenius_norm() const;

 private:
  Index n_rows_ = 0;
  Index n_cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// Builds a CSR matrix from coordinate triplets. Duplicates are summed;
/// an entry that cancels to zero stays in the pattern.
CsrMatrix assemble_csr(std::span<const Triplet> triplets, Index n_rows,
                       Index n_cols);

CsrMatrix identity_csr(Index n);
CsrMatrix from_dense(const DenseMatrix& dense, double drop_tol = 0.0);

/// True iff A equals its transpose exactly (pattern and values).
bool is_symmetric(const CsrMatrix& a);

// --- kernels -------------------------------------------------------------

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
Vector spmv(const CsrMatrix& a, const Vector& x);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// y <- y + alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

double dot(const Vector& x, const Vector& y);
double norm2(const Vector& x);
/// Returns y + alpha * x.
Vector axpy(double alpha, const Vector& x, const Vector& y);

/// y <- y - V * c  where V holds `c.size()` contiguous columns of length n.
void gemv_sub(const DenseMatrix& v, std::span<const double> c,
              std::span<double> y);
/// c <- V^T y over the first `cols` columns of V.
void gemv_t(const DenseMatrix& v, Index cols, std::span<const double> y,
            std::span<double> c);

namespace serial {
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
}  // namespace serial

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<double> as_span(Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<const double> column(const DenseMatrix& m, Index j) {
  return {m.data() + j * m.rows(), static_cast<std::size_t>(m.rows())};
}
inline std::span<double> column(DenseMatrix& m, Index j) {
  return {m.data() + j * m.rows(), static_cast<std::size_t>(m.rows())};
}

}  // namespace skr
