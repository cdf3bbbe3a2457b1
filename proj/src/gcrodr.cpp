#include "skr/gcrodr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "skr/dense.hpp"

namespace skr {

namespace {

constexpr double kSingularRcond = 1e-14;

HarmonicRitz select_smallest(const Eigen::VectorXcd& theta,
                             const Eigen::MatrixXcd& z, Index k) {
  HarmonicRitz out;
  out.values.assign(theta.data(), theta.data() + theta.size());
  EigenSelection sel = smallest_magnitude_basis(theta, z, k);
  out.p = std::move(sel.basis);
  out.selected = std::move(sel.selected);
  return out;
}

/// U = Y R^{-1}
DenseMatrix right_solve_upper(const DenseMatrix& y, const DenseMatrix& r) {
  DenseMatrix u = y;
  r.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(u);
  return u;
}

void apply_columns(const LinearOperator& op, const DenseMatrix& x,
                   DenseMatrix& y) {
  y.resize(x.rows(), x.cols());
  for (Index j = 0; j < x.cols(); ++j) op(column(x, j), column(y, j));
}

}  // namespace

HarmonicRitz harmonic_ritz_first_cycle(const DenseMatrix& hm, double h_sub,
                                       Index k) {
  const Index m = hm.rows();
  if (hm.cols() != m) throw DimensionError("harmonic ritz: H_m not square");
  DenseMatrix mod = hm;
  RitzPath path = RitzPath::Harmonic;
  if (h_sub != 0.0) {
    Eigen::PartialPivLU<DenseMatrix> lu(hm.transpose());
    const double rc = lu.rcond();
    Vector f;
    if (std::isfinite(rc) && rc > kSingularRcond) {
      Vector em = Vector::Zero(m);
      em[m - 1] = 1.0;
      f = lu.solve(em);
    }
    if (f.size() == m && f.allFinite()) {
      mod.col(m - 1) += h_sub * h_sub * f;
    } else {
      path = RitzPath::PlainRitz;
    }
  }
  Eigen::EigenSolver<DenseMatrix> es(mod, true);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("harmonic ritz: eigensolver failed");
  auto out = select_smallest(es.eigenvalues(), es.eigenvectors(), k);
  out.path = path;
  return out;
}

HarmonicRitz harmonic_ritz_subsequent(const DenseMatrix& g,
                                      const DenseMatrix& wtv, Index k) {
  const Index p = g.cols();
  if (g.rows() != p + 1) throw DimensionError("harmonic ritz: G must be (p+1) x p");
  DenseMatrix w(p + 1, p);
  if (wtv.rows() == p + 1 && wtv.cols() == p) {
    w = wtv;
  } else if (wtv.rows() == p && wtv.cols() == p) {
    w.topRows(p) = wtv;
    w.row(p).setZero();
  } else {
    throw DimensionError("harmonic ritz: cross-Gram has wrong shape");
  }

  // With G = Q R:  G^T G z = theta G^T W z  <=>  R^{-1} Q^T W z = z / theta.
  // Working with mu = 1/theta keeps a singular right-hand side harmless
  // (mu = 0 means theta = infinity, which is never selected).
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  const DenseMatrix r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  const DenseMatrix qtw =
      (qr.householderQ().transpose() * w).topRows(p);
  double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < p; ++i) {
    rmax = std::max(rmax, std::abs(r(i, i)));
    rmin = std::min(rmin, std::abs(r(i, i)));
  }
  DenseMatrix s;
  RitzPath path = RitzPath::Harmonic;
  if (p > 0 && rmin > 1e-13 * rmax) {
    s = r.triangularView<Eigen::Upper>().solve(qtw);
  } else {
    s = g.completeOrthogonalDecomposition().solve(w);
    path = RitzPath::Pseudoinverse;
  }
  Eigen::EigenSolver<DenseMatrix> es(s, true);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("harmonic ritz: eigensolver failed");
  Eigen::VectorXcd mu = es.eigenvalues();
  Eigen::VectorXcd theta(p);
  const double mu_scale = p > 0 ? mu.cwiseAbs().maxCoeff() : 0.0;
  for (Index i = 0; i < p; ++i) {
    theta[i] = std::abs(mu[i]) > 1e-300 + 1e-15 * mu_scale
                   ? 1.0 / mu[i]
                   : std::complex<double>(std::numeric_limits<double>::infinity(), 0.0);
  }
  auto out = select_smallest(theta, es.eigenvectors(), k);
  out.path = path;
  return out;
}

RecycleSpace refresh_recycle(const DenseMatrix& y, const LinearOperator& op,
                             Index* dropped) {
  RecycleSpace out;
  const Index k_in = y.cols();
  const DenseMatrix yo = gram_schmidt_qr(y, 1e-12).q;
  DenseMatrix z;
  apply_columns(op, yo, z);
  ThinQr qr = gram_schmidt_qr(z, 1e-12);
  out.c = std::move(qr.q);
  out.u = right_solve_upper(select_columns(yo, qr.kept), qr.r);
  if (dropped) *dropped = k_in - out.c.cols();
  return out;
}

RecycleSpace refresh_recycle(const DenseMatrix& y, const CsrMatrix& a,
                             const Preconditioner& m, Index* dropped) {
  if (y.rows() != a.rows()) throw DimensionError("refresh_recycle: row mismatch");
  return refresh_recycle(y, preconditioned_operator(a, m), dropped);
}

GcrodrResult gcrodr_solve(const CsrMatrix& a, const Vector& b, const Vector& x0,
                          const Preconditioner& m, const SolverConfig& cfg,
                          const RecycleSpace* recycle_in,
                          const GcrodrOptions& opts) {
  cfg.validate(true);
  const Index n = a.rows();
  if (a.cols() != n) throw DimensionError("gcrodr: matrix not square");
  if (b.size() != n || x0.size() != n)
    throw DimensionError("gcrodr: b/x0 length mismatch");
  if (recycle_in && !recycle_in->empty() && recycle_in->u.rows() != n)
    throw DimensionError("gcrodr: recycle space dimension mismatch");

  const auto t0 = std::chrono::steady_clock::now();
  GcrodrResult res;
  SolveReport& rep = res.report;
  auto& diag = res.diagnostics;
  if (b.norm() == 0.0) {
    rep.x = Vector::Zero(n);
    rep.converged = true;
    return res;
  }

  auto op = preconditioned_operator(a, m);
  detail::ResidualState st;
  st.prec_bnorm = m.apply(b).norm();
  if (!(st.prec_bnorm > 0.0))
    throw std::runtime_error("gcrodr: preconditioned right-hand side vanished");
  Vector work(n);
  rep.x = x0;
  detail::update_residual(a, b, m, rep.x, st, work);

  const Index mm = std::min(cfg.m, n);
  const Index k_target = std::min(cfg.k, mm - 1);
  DenseMatrix u(n, 0), c(n, 0);

  auto rebuild = [&](const DenseMatrix& vhat, const DenseMatrix& what,
                     const DenseMatrix& g, const HarmonicRitz& hr) {
    ThinQr qr = gram_schmidt_qr(g * hr.p, 1e-12);
    c = what * qr.q;
    u = right_solve_upper(vhat * select_columns(hr.p, qr.kept), qr.r);
    // W-hat is only orthonormal to the Arnoldi reorthogonalization tolerance
    ThinQr cq = gram_schmidt_qr(c, 1e-12);
    c = std::move(cq.q);
    u = right_solve_upper(select_columns(u, cq.kept), cq.r);
    diag.theta_abs.clear();
    for (auto t : hr.selected) diag.theta_abs.push_back(std::abs(t));
    diag.last_path = hr.path;
    if (hr.path != RitzPath::Harmonic)
      rep.notes.push_back(hr.path == RitzPath::PlainRitz
                              ? "harmonic ritz: singular H_m, used plain Ritz vectors"
                              : "harmonic ritz: rank-deficient G, used pseudoinverse");
  };

  bool have_recycle = false;
  if (k_target > 0 && recycle_in && !recycle_in->empty()) {
    Index dropped = 0;
    RecycleSpace fresh = refresh_recycle(recycle_in->u, op, &dropped);
    rep.operator_applications += recycle_in->u.cols();
    diag.dropped = dropped;
    if (dropped > 0)
      rep.notes.push_back("recycle refresh dropped " + std::to_string(dropped) +
                          " rank-deficient column(s)");
    if (opts.measure_refresh && !fresh.empty()) {
      DenseMatrix au;
      apply_columns(op, fresh.u, au);
      rep.operator_applications += fresh.u.cols();
      diag.relation_residual = (au - fresh.c).norm() / fresh.c.norm();
    }
    if (!fresh.empty()) {
      u = std::move(fresh.u);
      c = std::move(fresh.c);
      have_recycle = true;
      // x1 = x0 + U C^T r0
      const Vector ctr = c.transpose() * st.r;
      rep.x.noalias() += u * ctr;
      detail::update_residual(a, b, m, rep.x, st, work);
    } else {
      rep.recycle_degenerate = true;
      rep.notes.push_back("recycle space collapsed to k = 0");
    }
  }
  diag.k_in = c.cols();

  GivensLeastSquares ls(mm);

  // First cycle without a recycle space: plain GMRES(m), then harmonic Ritz
  // extraction from its Hessenberg matrix.
  double target = cfg.tol;
  if (!have_recycle && st.rel > target && rep.iterations < cfg.max_iter) {
    ArnoldiFactorization arn(n, mm);
    ls.reset(arn.start(as_span(st.r)));
    for (Index j = 0; j < mm; ++j) {
      const auto step = arn.expand(op);
      ++rep.iterations;
      const double est = ls.push_column(arn.hessenberg_column(j)) / st.prec_bnorm;
      rep.residual_history.push_back(est);
      if (est <= target || step == ArnoldiFactorization::Step::Breakdown ||
          rep.iterations >= cfg.max_iter)
        break;
    }
    const Index jj = arn.dim();
    const DenseMatrix vj1 = arn.basis();
    rep.x.noalias() += vj1.leftCols(jj) * ls.solve();
    detail::update_residual(a, b, m, rep.x, st, work);
    rep.cycle_lengths.push_back(jj);
    rep.cycle_residuals.push_back(st.rel);

    if (k_target > 0 && jj > 0) {
      const DenseMatrix hbar = arn.hessenberg();
      const auto hr = harmonic_ritz_first_cycle(hbar.topRows(jj), hbar(jj, jj - 1),
                                                std::min(k_target, jj));
      rebuild(vj1.leftCols(jj), vj1, hbar, hr);
    }
  }

  do {
    while (st.rel > target && rep.iterations < cfg.max_iter) {
      const Index kk = c.cols();
      const Index steps = std::max<Index>(1, mm - kk);
      ArnoldiFactorization arn(n, steps, kk > 0 ? &c : nullptr);
      const double beta = arn.start(as_span(st.r));
      GivensLeastSquares cycle_ls(steps);
      cycle_ls.reset(beta);
      for (Index j = 0; j < steps; ++j) {
        const auto step = arn.expand(op);
        ++rep.iterations;
        // C^T r = 0 up to rounding, so the deflated Hessenberg alone carries
        // the residual norm of the block least-squares problem.
        const double est =
            cycle_ls.push_column(arn.hessenberg_column(j)) / st.prec_bnorm;
        rep.residual_history.push_back(est);
        if (est <= target || step == ArnoldiFactorization::Step::Breakdown ||
            rep.iterations >= cfg.max_iter)
          break;
      }
      const Index jj = arn.dim();
      const Index p = kk + jj;

      // Vhat = [U D, V_j],  What = [C, V_{j+1}],  G = [D B; 0 Hbar]
      DenseMatrix vhat(n, p), what(n, p + 1);
      DenseMatrix g = DenseMatrix::Zero(p + 1, p);
      for (Index i = 0; i < kk; ++i) {
        const double d = 1.0 / u.col(i).norm();
        vhat.col(i) = u.col(i) * d;
        g(i, i) = d;
      }
      const DenseMatrix& vstore = arn.basis_storage();
      vhat.rightCols(jj) = vstore.leftCols(jj);
      what.leftCols(kk) = c;
      what.rightCols(jj + 1) = vstore.leftCols(jj + 1);
      if (kk > 0) g.block(0, kk, kk, jj) = arn.coupling();
      g.block(kk, kk, jj + 1, jj) = arn.hessenberg();

      if (kk > 0) {
        Vector rhs = Vector::Zero(p + 1);
        rhs.head(kk) = c.transpose() * st.r;
        rhs[kk] = beta;
        const Vector y = g.householderQr().solve(rhs);
        rep.x.noalias() += vhat * y;
      } else {
        // no recycle space: G is the Hessenberg matrix the Givens
        // recurrence has already triangularized
        const Vector y = cycle_ls.solve();
        rep.x.noalias() += vstore.leftCols(jj) * y;
      }
      detail::update_residual(a, b, m, rep.x, st, work);
      rep.cycle_lengths.push_back(jj);
      rep.cycle_residuals.push_back(st.rel);

      if (k_target > 0) {
        const DenseMatrix wtv = what.transpose() * vhat;
        const auto hr = harmonic_ritz_subsequent(g, wtv, std::min(k_target, p));
        rebuild(vhat, what, g, hr);
      }
    }
  } while (detail::tighten_target(a, b, cfg, st, target, rep));

  rep.operator_applications += rep.iterations;
  rep.preconditioned_relative_residual = st.rel;
  detail::finalize_report(a, b, cfg.tol, rep);
  res.recycle.u = std::move(u);
  res.recycle.c = std::move(c);
  diag.k_out = res.recycle.k();
  rep.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace skr
