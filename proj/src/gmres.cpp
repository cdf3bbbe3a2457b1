#include "skr/gmres.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <stdexcept>

namespace skr {

namespace {

constexpr double kBreakdownTol = 1e-14;
constexpr double kReorthTol = 1e-8;
constexpr double kMinTarget = 1e-15;

}  // namespace

LinearOperator preconditioned_operator(const CsrMatrix& a,
                                       const Preconditioner& m) {
  if (m.kind() == PrecondKind::None) {
    return [&a](std::span<const double> x, std::span<double> y) {
      spmv(a, x, y);
    };
  }
  return [&a, &m, tmp = Vector(a.rows())](std::span<const double> x,
                                         std::span<double> y) mutable {
    spmv(a, x, as_span(tmp));
    m.apply(as_span(tmp), y);
  };
}

void SolverConfig::validate(bool uses_recycling) const {
  if (m < 2) throw std::invalid_argument("solver: m must be >= 2");
  if (!(tol > 0.0)) throw std::invalid_argument("solver: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("solver: max_iter must be >= 1");
  if (uses_recycling && (k < 0 || k >= m))
    throw std::invalid_argument("solver: recycle dimension k must satisfy 0 <= k < m");
}

// --- Arnoldi -----------------------------------------------------------------

ArnoldiFactorization::ArnoldiFactorization(Index n, Index max_dim,
                                           const DenseMatrix* deflation)
    : n_(n),
      max_dim_(max_dim),
      c_(deflation && deflation->cols() > 0 ? deflation : nullptr),
      v_(DenseMatrix::Zero(n, max_dim + 1)),
      h_(DenseMatrix::Zero(max_dim + 1, max_dim)),
      b_(DenseMatrix::Zero(c_ ? c_->cols() : 0, max_dim)),
      w_(n),
      scratch_(max_dim + 1 + (c_ ? c_->cols() : 0)) {
  if (c_ && c_->rows() != n)
    throw DimensionError("arnoldi: deflation block has wrong row count");
}

double ArnoldiFactorization::start(std::span<const double> r) {
  if (static_cast<Index>(r.size()) != n_)
    throw DimensionError("arnoldi: start vector length");
  dim_ = 0;
  breakdown_ = false;
  h_.setZero();
  b_.setZero();
  const double beta = norm2(r);
  auto v0 = column(v_, 0);
  if (beta > 0.0)
    for (Index i = 0; i < n_; ++i) v0[i] = r[i] / beta;
  else
    std::fill(v0.begin(), v0.end(), 0.0);
  return beta;
}

ArnoldiFactorization::Step ArnoldiFactorization::expand(const LinearOperator& op) {
  if (dim_ >= max_dim_) throw std::logic_error("arnoldi: capacity exhausted");
  if (breakdown_) throw std::logic_error("arnoldi: expand after breakdown");
  const Index j = dim_;
  auto w = as_span(w_);
  op(column(v_, j), w);
  const double norm_in = norm2(w);

  const Index kc = c_ ? c_->cols() : 0;
  for (Index i = 0; i < kc; ++i) {
    const double s = dot(column(*c_, i), w);
    b_(i, j) = s;
    axpy(-s, column(*c_, i), w);
  }
  for (Index i = 0; i <= j; ++i) {
    const double s = dot(column(v_, i), w);
    h_(i, j) = s;
    axpy(-s, column(v_, i), w);
  }

  // One more pass when the result has drifted out of the orthogonal
  // complement by more than the tolerance.
  double wn = norm2(w);
  double worst = 0.0;
  for (Index i = 0; i < kc; ++i) {
    scratch_[i] = dot(column(*c_, i), w);
    worst = std::max(worst, std::abs(scratch_[i]));
  }
  for (Index i = 0; i <= j; ++i) {
    scratch_[kc + i] = dot(column(v_, i), w);
    worst = std::max(worst, std::abs(scratch_[kc + i]));
  }
  if (worst > kReorthTol * wn) {
    for (Index i = 0; i < kc; ++i) {
      b_(i, j) += scratch_[i];
      axpy(-scratch_[i], column(*c_, i), w);
    }
    for (Index i = 0; i <= j; ++i) {
      h_(i, j) += scratch_[kc + i];
      axpy(-scratch_[kc + i], column(v_, i), w);
    }
    wn = norm2(w);
  }

  h_(j + 1, j) = wn;
  auto vnext = column(v_, j + 1);
  ++dim_;
  if (wn <= kBreakdownTol * norm_in || wn == 0.0) {
    breakdown_ = true;
    std::fill(vnext.begin(), vnext.end(), 0.0);
    return Step::Breakdown;
  }
  for (Index i = 0; i < n_; ++i) vnext[i] = w[i] / wn;
  return Step::Ok;
}

DenseMatrix ArnoldiFactorization::coupling() const {
  return b_.leftCols(dim_);
}

// --- Givens -----------------------------------------------------------------

GivensLeastSquares::GivensLeastSquares(Index max_dim)
    : r_(DenseMatrix::Zero(max_dim + 1, max_dim)),
      g_(Vector::Zero(max_dim + 1)),
      cs_(Vector::Zero(max_dim)),
      sn_(Vector::Zero(max_dim)) {}

void GivensLeastSquares::reset(double beta) {
  j_ = 0;
  g_.setZero();
  g_[0] = beta;
}

double GivensLeastSquares::push_column(Eigen::Ref<const Vector> hcol) {
  const Index j = j_;
  Vector col = hcol.head(j + 2);
  for (Index i = 0; i < j; ++i) {
    const double t = cs_[i] * col[i] + sn_[i] * col[i + 1];
    col[i + 1] = -sn_[i] * col[i] + cs_[i] * col[i + 1];
    col[i] = t;
  }
  const double a = col[j];
  const double b = col[j + 1];
  const double rho = std::hypot(a, b);
  if (rho == 0.0) {
    cs_[j] = 1.0;
    sn_[j] = 0.0;
  } else {
    cs_[j] = a / rho;
    sn_[j] = b / rho;
  }
  col[j] = rho;
  col[j + 1] = 0.0;
  r_.col(j).head(j + 2) = col;
  g_[j + 1] = -sn_[j] * g_[j];
  g_[j] = cs_[j] * g_[j];
  ++j_;
  return std::abs(g_[j + 1]);
}

Vector GivensLeastSquares::solve() const {
  Vector y = g_.head(j_);
  for (Index i = j_ - 1; i >= 0; --i) {
    for (Index c = i + 1; c < j_; ++c) y[i] -= r_(i, c) * y[c];
    y[i] = r_(i, i) != 0.0 ? y[i] / r_(i, i) : 0.0;
  }
  return y;
}

// --- shared residual bookkeeping ----------------------------------------------

namespace detail {

void update_residual(const CsrMatrix& a, const Vector& b,
                     const Preconditioner& m, const Vector& x,
                     ResidualState& st, Vector& work) {
  spmv(a, as_span(x), as_span(work));
  work = b - work;
  st.r.resize(b.size());
  m.apply(as_span(work), as_span(st.r));
  st.rel = norm2(st.r) / st.prec_bnorm;
}

double true_relative_residual(const CsrMatrix& a, const Vector& b, const Vector& x) {
  const double bn = b.norm();
  return bn > 0.0 ? (b - spmv(a, x)).norm() / bn : 0.0;
}

bool tighten_target(const CsrMatrix& a, const Vector& b, const SolverConfig& cfg,
                    const ResidualState& st, double& target, SolveReport& rep) {
  if (st.rel > target || rep.iterations >= cfg.max_iter) return false;
  const double t = true_relative_residual(a, b, rep.x);
  if (t <= kTrueResidualSlack * cfg.tol) return false;
  const double next = target * std::min(0.5, 0.5 * kTrueResidualSlack * cfg.tol / t);
  if (next < kMinTarget) return false;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "true residual %.3e above %.0f x tol; preconditioned target lowered to %.3e",
                t, kTrueResidualSlack, next);
  rep.notes.emplace_back(buf);
  target = next;
  return true;
}

void finalize_report(const CsrMatrix& a, const Vector& b, double tol,
                     SolveReport& rep) {
  rep.true_relative_residual = true_relative_residual(a, b, rep.x);
  rep.converged = rep.preconditioned_relative_residual <= tol &&
                  rep.true_relative_residual <= kTrueResidualSlack * tol;
}

}  // namespace detail

// --- GMRES --------------------------------------------------------------------

SolveReport gmres_solve(const CsrMatrix& a, const Vector& b, const Vector& x0,
                        const Preconditioner& m, const SolverConfig& cfg) {
  cfg.validate(false);
  const Index n = a.rows();
  if (a.cols() != n) throw DimensionError("gmres: matrix not square");
  if (b.size() != n || x0.size() != n)
    throw DimensionError("gmres: b/x0 length mismatch");

  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  if (b.norm() == 0.0) {
    rep.x = Vector::Zero(n);
    rep.converged = true;
    return rep;
  }

  auto op = preconditioned_operator(a, m);
  detail::ResidualState st;
  st.prec_bnorm = m.apply(b).norm();
  if (!(st.prec_bnorm > 0.0))
    throw std::runtime_error("gmres: preconditioned right-hand side vanished");

  Vector work(n);
  rep.x = x0;
  detail::update_residual(a, b, m, rep.x, st, work);

  const Index mm = std::min(cfg.m, n);
  ArnoldiFactorization arnoldi(n, mm);
  GivensLeastSquares ls(mm);

  double target = cfg.tol;
  do {
    while (st.rel > target && rep.iterations < cfg.max_iter) {
      ls.reset(arnoldi.start(as_span(st.r)));
      for (Index j = 0; j < mm; ++j) {
        const auto step = arnoldi.expand(op);
        ++rep.iterations;
        const double est = ls.push_column(arnoldi.hessenberg_column(j)) / st.prec_bnorm;
        rep.residual_history.push_back(est);
        if (est <= target || step == ArnoldiFactorization::Step::Breakdown ||
            rep.iterations >= cfg.max_iter)
          break;
      }
      const Index j = arnoldi.dim();
      const Vector y = ls.solve();
      rep.x.noalias() += arnoldi.basis_storage().leftCols(j) * y;
      detail::update_residual(a, b, m, rep.x, st, work);
      rep.cycle_lengths.push_back(j);
      rep.cycle_residuals.push_back(st.rel);
    }
  } while (detail::tighten_target(a, b, cfg, st, target, rep));
  rep.operator_applications = rep.iterations;
  rep.preconditioned_relative_residual = st.rel;
  detail::finalize_report(a, b, cfg.tol, rep);
  rep.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace skr
