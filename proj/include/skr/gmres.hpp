#pragma once

/// \file skr/gmres.hpp
/// \brief Arnoldi process and left-preconditioned restarted GMRES(m).
///
/// Convergence is monitored on the preconditioned relative residual
/// ||M^{-1}(b - A x)|| / ||M^{-1} b||. `iterations` counts Arnoldi steps,
/// i.e. applications of the preconditioned operator M^{-1}A inside the
/// Krylov loop; the same unit is used by the recycling solver.

#include <functional>
#include <string>
#include <vector>

#include "skr/precond.hpp"
#include "skr/sparse.hpp"

namespace skr {

/// y <- op(x)
using LinearOperator =
    std::function<void(std::span<const double>, std::span<double>)>;

/// M^{-1} A as a LinearOperator. Keeps references; A and M must outlive it.
LinearOperator preconditioned_operator(const CsrMatrix& a,
                                       const Preconditioner& m);

struct SolverConfig {
  Index m = 50;          ///< subspace dimension per cycle
  double tol = 1e-8;     ///< preconditioned relative residual target
  Index max_iter = 10000;
  Index k = 10;          ///< recycle dimension (GCRO-DR only)

  /// Throws std::invalid_argument when a field is out of range.
  void validate(bool uses_recycling) const;
};

struct SolveReport {
  Vector x;
  Index iterations = 0;
  /// Preconditioned relative residual after every Arnoldi step.
  std::vector<double> residual_history;
  /// Explicit preconditioned relative residual at every cycle end.
  std::vector<double> cycle_residuals;
  std::vector<Index> cycle_lengths;
  double preconditioned_relative_residual = 0.0;
  double true_relative_residual = 0.0;
  bool converged = false;
  double wall_time = 0.0;
  /// All operator applications, including recycle refreshes.
  Index operator_applications = 0;
  /// GCRO-DR ran without a recycle space (k collapsed to 0).
  bool recycle_degenerate = false;
  std::vector<std::string> notes;

  bool timed_out(Index max_iter) const {
    return !converged && iterations >= max_iter;
  }
};

/// Orthonormal Krylov basis V (n x (j+1)) and Hessenberg H ((j+1) x j).
///
/// When a deflation block C (orthonormal columns) is supplied the process
/// runs on (I - C C^T) op and records the coupling B = C^T op(V) (k x j).
class ArnoldiFactorization {
 public:
  enum class Step { Ok, Breakdown };

  ArnoldiFactorization(Index n, Index max_dim, const DenseMatrix* deflation = nullptr);

  /// Resets to v1 = r / ||r||. Returns ||r||.
  double start(std::span<const double> r);

  /// One modified Gram-Schmidt step with conditional reorthogonalization.
  Step expand(const LinearOperator& op);

  Index dim() const { return dim_; }
  Index capacity() const { return max_dim_; }
  bool broke_down() const { return breakdown_; }

  /// Full storage, columns 0..dim() valid.
  const DenseMatrix& basis_storage() const { return v_; }
  DenseMatrix basis() const { return v_.leftCols(dim_ + 1); }
  DenseMatrix hessenberg() const { return h_.topLeftCorner(dim_ + 1, dim_); }
  DenseMatrix coupling() const;
  /// Column j of H, rows 0..j+1.
  Eigen::Ref<const Vector> hessenberg_column(Index j) const {
    return h_.col(j).head(j + 2);
  }

 private:
  Index n_;
  Index max_dim_;
  const DenseMatrix* c_;
  DenseMatrix v_;
  DenseMatrix h_;
  DenseMatrix b_;
  Vector w_;
  Vector scratch_;
  Index dim_ = 0;
  bool breakdown_ = false;
};

/// Incremental Givens QR of a growing Hessenberg matrix for
/// min || beta e1 - H y ||.
class GivensLeastSquares {
 public:
  explicit GivensLeastSquares(Index max_dim);
  void reset(double beta);
  /// Adds column j (length j+2); returns the current residual norm.
  double push_column(Eigen::Ref<const Vector> hcol);
  Vector solve() const;
  Index size() const { return j_; }

 private:
  DenseMatrix r_;
  Vector g_;
  Vector cs_;
  Vector sn_;
  Index j_ = 0;
};

/// A converged report has preconditioned relative residual <= tol and true
/// relative residual ||b - Ax|| / ||b|| <= kTrueResidualSlack * tol.
inline constexpr double kTrueResidualSlack = 10.0;

/// Restarted GMRES(m) on M^{-1} A x = M^{-1} b.
/// b = 0 returns x = 0, converged, zero iterations. When the preconditioned
/// criterion is met but the true residual is above the slack, iteration
/// continues against a lowered preconditioned target (noted in the report).
SolveReport gmres_solve(const CsrMatrix& a, const Vector& b, const Vector& x0,
                        const Preconditioner& m, const SolverConfig& cfg);

namespace detail {

/// Shared by both solvers: explicit residuals and exit bookkeeping.
struct ResidualState {
  Vector r;             ///< M^{-1}(b - A x)
  double prec_bnorm = 0.0;
  double rel = 0.0;     ///< ||r|| / prec_bnorm
};

void update_residual(const CsrMatrix& a, const Vector& b,
                     const Preconditioner& m, const Vector& x,
                     ResidualState& st, Vector& work);

double true_relative_residual(const CsrMatrix& a, const Vector& b, const Vector& x);

/// After an inner loop has met `target`: if the true residual is still above
/// the slack, lowers `target` and returns true (iterate again).
bool tighten_target(const CsrMatrix& a, const Vector& b, const SolverConfig& cfg,
                    const ResidualState& st, double& target, SolveReport& rep);

void finalize_report(const CsrMatrix& a, const Vector& b, double tol,
                     SolveReport& rep);

}  // namespace detail

}  // namespace skr
