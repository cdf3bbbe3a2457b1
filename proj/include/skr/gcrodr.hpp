#pragma once

/// \file skr/gcrodr.hpp
/// \brief GCRO-DR: GMRES with deflated restarting and a recycle space
///        (U, C) carried from one linear system to the next.
///
/// All recycling is done against the preconditioned operator M^{-1}A, so
/// the pair satisfies  M^{-1} A U = C,  C^T C = I  for the system it was
/// refreshed against.

#include <complex>
#include <optional>
#include <vector>

#include "skr/gmres.hpp"

namespace skr {

struct RecycleSpace {
  DenseMatrix u;
  DenseMatrix c;
  Index source_id = -1;

  Index k() const { return c.cols(); }
  bool empty() const { return c.cols() == 0; }
};

/// Which eigenproblem produced a set of harmonic Ritz vectors.
enum class RitzPath {
  Harmonic,       ///< the harmonic (modified Hessenberg / generalized) problem
  PlainRitz,      ///< H_m numerically singular: ordinary Ritz vectors of H_m
  Pseudoinverse,  ///< G rank deficient: least-squares reduction
};

struct HarmonicRitz {
  /// Orthonormal real basis (rows = problem size) of the selected invariant
  /// subspace. May carry one column more than requested so that a complex
  /// conjugate pair is never split.
  DenseMatrix p;
  /// Every eigenvalue of the problem, in solver order.
  std::vector<std::complex<double>> values;
  /// Selected eigenvalues, smallest magnitude first.
  std::vector<std::complex<double>> selected;
  RitzPath path = RitzPath::Harmonic;
};

/// Harmonic Ritz vectors after a plain Arnoldi cycle: eigenvectors of
/// H_m + h^2 H_m^{-T} e_m e_m^T for the k smallest |theta|.
HarmonicRitz harmonic_ritz_first_cycle(const DenseMatrix& hm, double h_sub,
                                       Index k);

/// Harmonic Ritz vectors after a deflated cycle: solves
/// G^T G z = theta G^T (W^T V) z, G of size (p+1) x p.
/// `wtv` is the (p+1) x p cross-Gram W^T V; a p x p block is accepted and
/// treated as having a zero last row.
HarmonicRitz harmonic_ritz_subsequent(const DenseMatrix& g,
                                      const DenseMatrix& wtv, Index k);

/// Re-targets a recycle space to a new operator: [Q, R] = qr(op(Y)),
/// C = Q, U = Y R^{-1}. Y is orthonormalized first. Rank-deficient
/// directions are dropped; `dropped` (optional) receives how many.
RecycleSpace refresh_recycle(const DenseMatrix& y, const LinearOperator& op,
                             Index* dropped = nullptr);
RecycleSpace refresh_recycle(const DenseMatrix& y, const CsrMatrix& a,
                             const Preconditioner& m, Index* dropped = nullptr);

struct RecycleDiagnostics {
  Index k_in = 0;          ///< recycle dimension after the refresh
  Index k_out = 0;
  Index dropped = 0;       ///< columns lost to rank deficiency in the refresh
  /// ||M^{-1}A U - C||_F / ||C||_F after the refresh (NaN when not computed).
  double relation_residual = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> theta_abs;  ///< |theta| of the last selection
  RitzPath last_path = RitzPath::Harmonic;
};

struct GcrodrResult {
  SolveReport report;
  /// Recycle pair of the final cycle; its U is the next system's Y.
  RecycleSpace recycle;
  RecycleDiagnostics diagnostics;
};

struct GcrodrOptions {
  /// Spend k extra operator applications to measure the refresh residual.
  bool measure_refresh = false;
};

/// Solves one system, optionally starting from a recycle space produced by a
/// previous solve. With cfg.k == 0 this is restarted GMRES(m).
GcrodrResult gcrodr_solve(const CsrMatrix& a, const Vector& b, const Vector& x0,
                          const Preconditioner& m, const SolverConfig& cfg,
                          const RecycleSpace* recycle_in = nullptr,
                          const GcrodrOptions& opts = {});

}  // namespace skr
