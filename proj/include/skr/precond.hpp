#pragma once

/// \file skr/precond.hpp
/// \brief Left preconditioners M: identity, Jacobi, block Jacobi, SOR,
///        ILU(0) and IC(0).

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skr/sparse.hpp"

namespace skr {

enum class PrecondKind { None, Jacobi, BlockJacobi, Sor, Ilu0, Icc0 };

std::string_view to_string(PrecondKind kind);
/// Accepts none|jacobi|bjacobi|sor|ilu0|icc0 (also ilu, icc).
PrecondKind parse_precond_kind(std::string_view name);

struct PrecondOptions {
  PrecondKind kind = PrecondKind::None;
  double sor_omega = 1.0;
  Index bjacobi_block = 64;
};

/// Raised when a factorization meets a zero (or, for IC(0), non-positive)
/// pivot. `row` names the offending row.
class ZeroPivotError : public std::runtime_error {
 public:
  ZeroPivotError(const std::string& what, Index row)
      : std::runtime_error(what), row_(row) {}
  Index row() const { return row_; }

 private:
  Index row_;
};

/// Immutable after construction; apply() is const and thread-safe.
class Preconditioner {
 public:
  Preconditioner() = default;

  PrecondKind kind() const { return opts_.kind; }
  const PrecondOptions& options() const { return opts_; }
  Index size() const { return n_; }

  /// z <- M^{-1} v
  void apply(std::span<const double> v, std::span<double> z) const;
  Vector apply(const Vector& v) const;

  /// Incomplete factors (ILU0: unit-lower L and upper U; ICC0: L and
  /// sign * L^T). Empty for other kinds.
  CsrMatrix lower_factor() const;
  CsrMatrix upper_factor() const;

  /// Stored inverse-free diagonal for Jacobi.
  const Vector& jacobi_diagonal() const { return diag_; }

  friend Preconditioner build_preconditioner(const CsrMatrix& a,
                                             const PrecondOptions& opts);

 private:
  void apply_lower(std::span<const double> v, std::span<double> z) const;
  void apply_upper(std::span<double> z) const;

  PrecondOptions opts_;
  Index n_ = 0;
  Vector diag_;
  // BlockJacobi: per-block LU factors.
  std::vector<Eigen::PartialPivLU<DenseMatrix>> blocks_;
  // SOR/ILU0/ICC0: factor values on A's pattern (ICC0 uses the lower part).
  CsrMatrix pattern_;
  std::vector<double> factor_;
  std::vector<Index> diag_pos_;
  double icc_sign_ = 1.0;
};

/// Builds M for A. Throws ZeroPivotError on a zero pivot and
/// std::invalid_argument on a non-square A, a bad omega, or IC(0) on a
/// nonsymmetric matrix.
Preconditioner build_preconditioner(const CsrMatrix& a,
                                    const PrecondOptions& opts);

inline Preconditioner build_preconditioner(const CsrMatrix& a,
                                           PrecondKind kind) {
  return build_preconditioner(a, PrecondOptions{kind});
}

/// M itself as a sparse matrix, for the A that `m` was built from.
CsrMatrix preconditioner_matrix(const CsrMatrix& a, const Preconditioner& m);

}  // namespace skr
