#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "lapack_oracle.hpp"
#include "skr/gcrodr.hpp"
#include "support.hpp"

using namespace skr;
using skr::test::Gen;

namespace {

LinearOperator dense_op(const DenseMatrix& a) {
  return [a](std::span<const double> x, std::span<double> y) {
    Eigen::Map<const Vector> xv(x.data(), static_cast<Index>(x.size()));
    Eigen::Map<Vector>(y.data(), static_cast<Index>(y.size())) = a * xv;
  };
}

DenseMatrix apply_op(const LinearOperator& op, const DenseMatrix& x) {
  DenseMatrix y(x.rows(), x.cols());
  for (Index j = 0; j < x.cols(); ++j) op(column(x, j), column(y, j));
  return y;
}

// every oracle eigenvalue has a partner in `got` within tol (relative)
bool spectra_match(const Eigen::VectorXcd& oracle,
                   const std::vector<std::complex<double>>& got, double tol) {
  if (static_cast<std::size_t>(oracle.size()) != got.size()) return false;
  std::vector<bool> used(got.size(), false);
  for (Index i = 0; i < oracle.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t at = 0;
    for (std::size_t j = 0; j < got.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(oracle[i] - got[j]);
      if (d < best) best = d, at = j;
    }
    if (best > tol * std::max(1.0, std::abs(oracle[i]))) return false;
    used[at] = true;
  }
  return true;
}

// the selected values are the smallest |theta| of the whole spectrum
bool selected_are_smallest(const HarmonicRitz& hr) {
  std::vector<double> all;
  for (const auto& v : hr.values) all.push_back(std::abs(v));
  std::sort(all.begin(), all.end());
  double largest_selected = 0.0;
  for (const auto& v : hr.selected) largest_selected = std::max(largest_selected, std::abs(v));
  const std::size_t need = hr.selected.size();
  return need <= all.size() && largest_selected <= all[need - 1] * (1 + 1e-12);
}

// p spans an invariant subspace of mod: residual of mod*P projected off P
double invariance_residual(const DenseMatrix& mod, const DenseMatrix& p) {
  const DenseMatrix mp = mod * p;
  return (mp - p * (p.transpose() * mp)).norm() / std::max(1.0, mod.norm());
}

// -Laplace(u) + (bx, by) . grad(u) on an nx x nx interior grid, central differences
CsrMatrix convection_diffusion(Index nx, double bx, double by) {
  const double h = 1.0 / static_cast<double>(nx + 1);
  std::vector<Triplet> t;
  for (Index j = 0; j < nx; ++j)
    for (Index i = 0; i < nx; ++i) {
      const Index r = j * nx + i;
      t.push_back({r, r, 4.0});
      if (i > 0) t.push_back({r, r - 1, -1.0 - 0.5 * h * bx});
      if (i + 1 < nx) t.push_back({r, r + 1, -1.0 + 0.5 * h * bx});
      if (j > 0) t.push_back({r, r - nx, -1.0 - 0.5 * h * by});
      if (j + 1 < nx) t.push_back({r, r + nx, -1.0 + 0.5 * h * by});
    }
  return assemble_csr(t, nx * nx, nx * nx);
}

DenseMatrix random_hessenberg(Gen& g, Index m) {
  DenseMatrix h = g.matrix(m, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = j + 2; i < m; ++i) h(i, j) = 0.0;
  return h;
}

}  // namespace

TEST_CASE("refresh examples") {
  SUBCASE("identity keeps an orthonormal Y") {
    Gen g(1);
    const DenseMatrix y = test::orthonormal_columns(g.matrix(8, 3));
    const auto rs = refresh_recycle(y, dense_op(DenseMatrix::Identity(8, 8)));
    REQUIRE(rs.k() == 3);
    CHECK((rs.c - y).norm() <= 1e-12);
    CHECK((rs.u - y).norm() <= 1e-12);
  }
  SUBCASE("diag(2,3,4) with e1") {
    const DenseMatrix a = Vector{{2.0, 3.0, 4.0}}.asDiagonal();
    const auto rs = refresh_recycle(DenseMatrix(Vector::Unit(3, 0)), dense_op(a));
    REQUIRE(rs.k() == 1);
    CHECK(rs.c.col(0) == Vector::Unit(3, 0));
    CHECK(rs.u.col(0) == Vector::Unit(3, 0) / 2.0);
    CHECK(a * rs.u == rs.c);
  }
  SUBCASE("random 50x3 against a sparse operator") {
    Gen g(2);
    const auto a = g.sparse(50, 4);
    const auto none = build_preconditioner(a, PrecondKind::None);
    const auto rs = refresh_recycle(g.matrix(50, 3), a, none);
    REQUIRE(rs.k() == 3);
    const DenseMatrix ad = a.to_dense();
    CHECK((ad * rs.u - rs.c).norm() <= 1e-10);
    CHECK((rs.c.transpose() * rs.c - DenseMatrix::Identity(3, 3)).norm() <= 1e-12);
    // dense QR oracle: C spans A*Y
    const DenseMatrix q = test::orthonormal_columns(ad * test::orthonormal_columns(rs.u));
    CHECK(test::principal_angle_sine(q, rs.c) <= 1e-10);
  }
}

TEST_CASE("refresh drops rank-deficient directions") {
  Gen g(3);
  DenseMatrix y = g.matrix(30, 4);
  y.col(3) = y.col(0) - 2.0 * y.col(1);
  Index dropped = -1;
  const auto rs = refresh_recycle(y, dense_op(DenseMatrix::Identity(30, 30)), &dropped);
  CHECK(dropped == 1);
  CHECK(rs.k() == 3);

  // operator annihilating the whole span collapses to empty
  const auto zero = refresh_recycle(g.matrix(10, 2), dense_op(DenseMatrix::Zero(10, 10)), &dropped);
  CHECK(zero.empty());
  CHECK(dropped == 2);
}

TEST_CASE("property: refresh invariants against preconditioned operators") {
  Gen g(4);
  const PrecondKind kinds[] = {PrecondKind::None, PrecondKind::Jacobi, PrecondKind::Ilu0,
                               PrecondKind::Sor, PrecondKind::BlockJacobi};
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = g.integer(20, 200);
    const Index k = g.integer(1, 12);
    const auto a = g.sparse(n, 5);
    const auto m = build_preconditioner(a, kinds[trial % 5]);
    const auto rs = refresh_recycle(g.matrix(n, k), a, m);
    REQUIRE(rs.k() == k);
    const DenseMatrix au = apply_op(preconditioned_operator(a, m), rs.u);
    CHECK((au - rs.c).norm() <= 1e-8 * rs.c.norm());
    CHECK((rs.c.transpose() * rs.c - DenseMatrix::Identity(k, k)).norm() <= 1e-10);
  }
}

TEST_CASE("harmonic ritz (first cycle) examples") {
  SUBCASE("diag(1,10,100), h = 0") {
    const DenseMatrix h = Vector{{1.0, 10.0, 100.0}}.asDiagonal();
    const auto hr = harmonic_ritz_first_cycle(h, 0.0, 1);
    REQUIRE(hr.p.cols() == 1);
    CHECK(std::abs(std::abs(hr.p(0, 0)) - 1.0) <= 1e-14);
    CHECK(hr.selected[0].real() == doctest::Approx(1.0));
  }
  SUBCASE("rotation keeps the conjugate pair together") {
    DenseMatrix h(2, 2);
    h << 0, -1, 1, 0;
    const auto hr = harmonic_ritz_first_cycle(h, 0.0, 1);
    CHECK(hr.p.cols() == 2);
    CHECK(hr.selected.size() == 2);
    CHECK(std::abs(hr.selected[0].imag()) == doctest::Approx(1.0));
    CHECK((hr.p.transpose() * hr.p - DenseMatrix::Identity(2, 2)).norm() <= 1e-12);
  }
}

TEST_CASE("property: first-cycle harmonic Ritz vs LAPACK dgeev on the modified matrix") {
  Gen g(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Index m = 20;
    const DenseMatrix h = random_hessenberg(g, m) + 3.0 * DenseMatrix::Identity(m, m);
    const double hs = g.uniform(0.1, 2.0);
    const Index k = g.integer(1, 8);
    // independent construction: explicit inverse transpose
    const DenseMatrix mod =
        h + hs * hs * h.transpose().inverse() * Vector::Unit(m, m - 1) *
                Vector::Unit(m, m - 1).transpose();
    const auto oracle = test::lapack_eig(mod);
    const auto hr = harmonic_ritz_first_cycle(h, hs, k);
    CHECK(hr.path == RitzPath::Harmonic);
    CHECK(spectra_match(oracle.values, hr.values, 1e-8));
    CHECK(selected_are_smallest(hr));
    CHECK((hr.p.cols() == k || hr.p.cols() == k + 1));
    CHECK((hr.p.transpose() * hr.p - DenseMatrix::Identity(hr.p.cols(), hr.p.cols())).norm() <= 1e-10);
    CHECK(invariance_residual(mod, hr.p) <= 1e-8);
  }
}

TEST_CASE("first cycle falls back to plain Ritz on a singular H") {
  DenseMatrix h = DenseMatrix::Zero(3, 3);
  h(0, 0) = 1.0;
  h(1, 0) = 1.0;
  h(1, 1) = 2.0;
  const auto hr = harmonic_ritz_first_cycle(h, 0.5, 1);
  CHECK(hr.path == RitzPath::PlainRitz);
  CHECK(hr.p.cols() >= 1);
}

TEST_CASE("harmonic ritz (subsequent) examples") {
  SUBCASE("G = [I; 0], cross-Gram I") {
    DenseMatrix gm = DenseMatrix::Zero(4, 3);
    gm.topRows(3).setIdentity();
    const auto hr = harmonic_ritz_subsequent(gm, DenseMatrix::Identity(3, 3), 2);
    for (const auto& v : hr.values) CHECK(std::abs(v - 1.0) <= 1e-12);
    CHECK(hr.p.cols() == 2);
  }
  SUBCASE("scalar case") {
    const DenseMatrix gm = Vector{{2.0, 0.0}};
    const auto hr = harmonic_ritz_subsequent(gm, DenseMatrix::Ones(1, 1), 1);
    REQUIRE(hr.values.size() == 1);
    CHECK(std::abs(hr.values[0] - 2.0) <= 1e-12);
  }
  SUBCASE("shape errors") {
    CHECK_THROWS_AS(harmonic_ritz_subsequent(DenseMatrix::Zero(3, 3), DenseMatrix::Identity(3, 3), 1),
                    DimensionError);
    CHECK_THROWS_AS(harmonic_ritz_subsequent(DenseMatrix::Zero(4, 3), DenseMatrix::Identity(2, 2), 1),
                    DimensionError);
  }
}

TEST_CASE("property: subsequent harmonic Ritz vs LAPACK dggev") {
  Gen g(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Index p = g.integer(4, 20);
    DenseMatrix gm = g.matrix(p + 1, p);
    gm.topRows(p) += 4.0 * DenseMatrix::Identity(p, p);
    DenseMatrix wtv = g.matrix(p + 1, p) * 0.2;
    wtv.topRows(p) += DenseMatrix::Identity(p, p);
    const Index k = g.integer(1, p - 1);
    const auto oracle = test::lapack_generalized_eigenvalues(gm.transpose() * gm, gm.transpose() * wtv);
    const auto hr = harmonic_ritz_subsequent(gm, wtv, k);
    CHECK(hr.path == RitzPath::Harmonic);
    CHECK(spectra_match(oracle, hr.values, 1e-8));
    CHECK(selected_are_smallest(hr));
    CHECK((hr.p.cols() == k || hr.p.cols() == k + 1));
  }
}

TEST_CASE("property: deflated Arnoldi basis is orthogonal to C and satisfies the projected relation") {
  Gen g(7);
  for (int trial = 0; trial < 15; ++trial) {
    const Index n = g.integer(40, 200);
    const Index k = g.integer(1, 10);
    const Index m = g.integer(3, 30);
    const DenseMatrix a = g.sparse(n, 4).to_dense();
    const DenseMatrix c = test::orthonormal_columns(g.matrix(n, k));
    ArnoldiFactorization f(n, m, &c);
    Vector r = g.vector(n);
    r -= c * (c.transpose() * r);
    f.start(as_span(r));
    for (Index j = 0; j < m; ++j) {
      if (f.expand(dense_op(a)) == ArnoldiFactorization::Step::Breakdown) break;
      CHECK((c.transpose() * f.basis()).cwiseAbs().maxCoeff() <= 1e-10);
    }
    const Index j = f.dim();
    const DenseMatrix v = f.basis();
    const DenseMatrix proj = DenseMatrix::Identity(n, n) - c * c.transpose();
    const DenseMatrix h = f.hessenberg();
    CHECK((proj * a * v.leftCols(j) - v * h).norm() <= 1e-8 * std::max(1.0, h.norm()));
    CHECK((f.coupling() - c.transpose() * a * v.leftCols(j)).norm() <= 1e-8 * a.norm());
  }
}

TEST_CASE("property: k = 0 reproduces GMRES residual histories") {
  Gen g(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = g.integer(20, 200);
    const auto a = g.sparse(n, 5, 0.7);
    const Vector b = g.vector(n);
    const auto m = build_preconditioner(a, trial % 2 ? PrecondKind::Jacobi : PrecondKind::Ilu0);
    SolverConfig cfg;
    cfg.m = g.integer(5, 30);
    cfg.k = 0;
    cfg.tol = 1e-9;
    const auto ref = gmres_solve(a, b, Vector::Zero(n), m, cfg);
    const auto got = gcrodr_solve(a, b, Vector::Zero(n), m, cfg);
    REQUIRE(got.report.residual_history.size() == ref.residual_history.size());
    for (std::size_t i = 0; i < ref.residual_history.size(); ++i)
      CHECK(std::abs(got.report.residual_history[i] - ref.residual_history[i]) <=
            1e-10 * ref.residual_history[i]);
    CHECK(got.report.iterations == ref.iterations);
    CHECK(got.recycle.empty());
  }
}

TEST_CASE("identity with recycle from identity needs no Krylov steps") {
  const auto eye = identity_csr(6);
  const auto none = build_preconditioner(eye, PrecondKind::None);
  const Vector b{{1.0, 2.0, 3.0, 4.0, 5.0, 6.0}};
  SolverConfig cfg;
  cfg.m = 4;
  cfg.k = 2;
  const auto first = gcrodr_solve(eye, b, Vector::Zero(6), none, cfg);
  REQUIRE(first.report.converged);
  REQUIRE(!first.recycle.empty());
  const auto second = gcrodr_solve(eye, b, Vector::Zero(6), none, cfg, &first.recycle);
  CHECK(second.report.converged);
  CHECK(second.report.iterations == 0);
  CHECK((second.report.x - b).norm() <= 1e-12);
}

TEST_CASE("second of two identical systems takes fewer iterations") {
  Gen g(9);
  const Index n = 100;
  const auto a = g.sparse(n, 4, 0.4);
  const Vector b = g.vector(n);
  const auto m = build_preconditioner(a, PrecondKind::None);
  SolverConfig cfg;
  cfg.m = 20;
  cfg.k = 5;
  cfg.tol = 1e-8;
  const auto first = gcrodr_solve(a, b, Vector::Zero(n), m, cfg);
  const auto second = gcrodr_solve(a, b, Vector::Zero(n), m, cfg, &first.recycle);
  REQUIRE(first.report.converged);
  REQUIRE(second.report.converged);
  CHECK(second.report.iterations < first.report.iterations);
  const Vector ref = test::dense_solve(a, b);
  CHECK((second.report.x - ref).norm() <= 1e-6 * ref.norm());
  CHECK((first.report.x - ref).norm() <= 1e-6 * ref.norm());
}

TEST_CASE("property: converged solves meet the residual contract and match a dense solve") {
  Gen g(10);
  for (int trial = 0; trial < 15; ++trial) {
    const Index n = g.integer(30, 200);
    const auto a = g.sparse(n, 5, 0.6);
    SolverConfig cfg;
    cfg.m = g.integer(8, 30);
    cfg.k = g.integer(1, cfg.m / 2);
    cfg.tol = 1e-10;
    const auto m = build_preconditioner(a, trial % 2 ? PrecondKind::Sor : PrecondKind::None);
    RecycleSpace rs;
    for (int s = 0; s < 3; ++s) {
      const Vector b = g.vector(n);
      const auto res = gcrodr_solve(a, b, Vector::Zero(n), m, cfg, rs.empty() ? nullptr : &rs);
      REQUIRE(res.report.converged);
      CHECK(res.report.true_relative_residual <= 10.0 * cfg.tol);
      const Vector ref = test::dense_solve(a, b);
      CHECK((res.report.x - ref).norm() <= 1e-7 * ref.norm());
      if (!res.recycle.empty()) {
        CHECK((res.recycle.c.transpose() * res.recycle.c -
               DenseMatrix::Identity(res.recycle.k(), res.recycle.k())).norm() <= 1e-10);
      }
      rs = res.recycle;
    }
  }
}

TEST_CASE("property: recycling helps on correlated sequences") {
  Gen g(11);
  for (int seq = 0; seq < 5; ++seq) {
    const auto base = convection_diffusion(20, g.uniform(-20, 20), g.uniform(-20, 20));
    const Index n = base.rows();
    SolverConfig cfg;
    cfg.m = 30;
    cfg.k = 10;
    cfg.tol = 1e-8;
    RecycleSpace rs;
    std::vector<Index> iters;
    for (int s = 0; s < 6; ++s) {
      // relative Frobenius perturbation of 1e-3 on the existing pattern
      std::vector<double> vals(base.values().begin(), base.values().end());
      double pn = 0.0;
      std::vector<double> pert(vals.size());
      for (auto& p : pert) p = g.normal(), pn += p * p;
      const double scale = s == 0 ? 0.0 : 1e-3 * base.frobenius_norm() / std::sqrt(pn);
      for (std::size_t i = 0; i < vals.size(); ++i) vals[i] += scale * pert[i];
      const CsrMatrix a(n, n, std::vector<Index>(base.row_ptr().begin(), base.row_ptr().end()),
                        std::vector<Index>(base.col_idx().begin(), base.col_idx().end()), vals);
      const auto m = build_preconditioner(a, PrecondKind::None);
      const auto res = gcrodr_solve(a, g.vector(n), Vector::Zero(n), m, cfg,
                                    rs.empty() ? nullptr : &rs);
      REQUIRE(res.report.converged);
      iters.push_back(res.report.iterations);
      rs = res.recycle;
    }
    double mean = 0.0;
    for (std::size_t i = 1; i < iters.size(); ++i) mean += static_cast<double>(iters[i]);
    mean /= static_cast<double>(iters.size() - 1);
    CHECK(mean < static_cast<double>(iters[0]));
  }
}

TEST_CASE("gcrodr argument validation") {
  Gen g(12);
  const auto a = g.sparse(10, 3);
  const auto m = build_preconditioner(a, PrecondKind::None);
  SolverConfig cfg;
  cfg.m = 8;
  cfg.k = 8;
  CHECK_THROWS_AS(gcrodr_solve(a, Vector::Ones(10), Vector::Zero(10), m, cfg), std::invalid_argument);
  cfg.k = 2;
  CHECK_THROWS_AS(gcrodr_solve(a, Vector::Ones(9), Vector::Zero(10), m, cfg), DimensionError);
  RecycleSpace wrong{DenseMatrix::Identity(7, 2), DenseMatrix::Identity(7, 2), 0};
  CHECK_THROWS_AS(gcrodr_solve(a, Vector::Ones(10), Vector::Zero(10), m, cfg, &wrong), DimensionError);
}
