#pragma once

/// \file skr/dense.hpp
/// \brief Small dense helpers shared by the Krylov solvers and diagnostics.

#include <complex>
#include <vector>

#include "skr/sparse.hpp"

namespace skr {

/// Thin QR by classical Gram-Schmidt with one full reorthogonalization pass.
/// Columns whose remaining norm falls below `rel_tol` times the largest
/// input column norm are dropped; `kept` lists the surviving input columns,
/// so that  M(:, kept) = Q * R  with R upper triangular, positive diagonal.
struct ThinQr {
  DenseMatrix q;
  DenseMatrix r;
  std::vector<Index> kept;
};

ThinQr gram_schmidt_qr(const DenseMatrix& m, double rel_tol = 1e-12);

/// Columns of `m` listed in `idx`.
DenseMatrix select_columns(const DenseMatrix& m, const std::vector<Index>& idx);

/// ||Q^T Q - I||_F
double orthogonality_error(const DenseMatrix& q);

struct EigenSelection {
  /// Orthonormal real basis of the selected eigenvectors' span.
  DenseMatrix basis;
  /// Selected eigenvalues, smallest magnitude first.
  std::vector<std::complex<double>> selected;
};

/// The k eigenpairs of smallest |value|. A complex conjugate pair is never
/// split: if the k-th pick has its partner outside the selection, the partner
/// is added. Complex vectors contribute their real and imaginary parts.
EigenSelection smallest_magnitude_basis(const Eigen::VectorXcd& values,
                                        const Eigen::MatrixXcd& vectors, Index k);

}  // namespace skr
