#pragma once

/// \file skr/metrics.hpp
/// \brief Subspace geometry: orthonormal bases, the one-sided distance
///        between subspaces, and eigen-subspaces of M^{-1}A.

#include <complex>
#include <vector>

#include "skr/precond.hpp"
#include "skr/sparse.hpp"

namespace skr {

/// n x d matrix with orthonormal columns.
struct SubspaceBasis {
  DenseMatrix q;
  Index dim() const { return q.cols(); }
  Index ambient() const { return q.rows(); }
};

/// Orthonormal basis of span(M). Numerically dependent columns are dropped
/// and counted in `dropped`; an all-zero input gives an empty basis.
SubspaceBasis orthonormalize(const DenseMatrix& m, Index* dropped = nullptr);

/// delta = sigma_max((I - C C^T) Q), the sine of the largest principal angle
/// from span(Q) into span(C). 0 for empty Q; 1 for empty C and nonempty Q.
double one_sided_distance(const SubspaceBasis& q, const SubspaceBasis& c);

enum class EigMethod {
  Auto,          ///< dense up to kDenseAutoLimit, shift-invert above
  Dense,         ///< full dense eigendecomposition of M^{-1}A
  ShiftInvert,   ///< subspace iteration on A^{-1}M with a sparse LU of A
};

inline constexpr Index kDenseEigCap = 4000;
inline constexpr Index kDenseAutoLimit = 800;

struct EigSubspace {
  SubspaceBasis basis;
  std::vector<std::complex<double>> values;  ///< smallest magnitude first
  EigMethod method = EigMethod::Dense;
  Index iterations = 0;                      ///< shift-invert sweeps
  double max_residual = 0.0;                 ///< relative, shift-invert only
};

/// Invariant subspace of M^{-1}A for its k smallest-magnitude eigenvalues
/// (conjugate pairs kept whole). Throws std::invalid_argument when the dense
/// method is requested above kDenseEigCap, and std::runtime_error if the
/// iteration fails to converge.
EigSubspace smallest_eig_subspace(const CsrMatrix& a, const Preconditioner& m,
                                  Index k, EigMethod method = EigMethod::Auto,
                                  double tol = 1e-10);

}  // namespace skr
