#include "skr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "skr/dense.hpp"

namespace skr {

namespace {

Eigen::SparseMatrix<double> to_eigen(const CsrMatrix& a) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.nnz());
  for (const auto& e : a.to_triplets()) t.emplace_back(e.row, e.col, e.value);
  Eigen::SparseMatrix<double> s(a.rows(), a.cols());
  s.setFromTriplets(t.begin(), t.end());
  s.makeCompressed();
  return s;
}

EigSubspace dense_eig(const CsrMatrix& a, const Preconditioner& m, Index k) {
  const Index n = a.rows();
  DenseMatrix op(n, n);
  const DenseMatrix ad = a.to_dense();
  for (Index j = 0; j < n; ++j) op.col(j) = m.apply(Vector(ad.col(j)));
  Eigen::EigenSolver<DenseMatrix> es(op, true);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("smallest_eig_subspace: dense eigensolver failed");
  EigenSelection sel = smallest_magnitude_basis(es.eigenvalues(), es.eigenvectors(), k);
  EigSubspace out;
  out.basis.q = std::move(sel.basis);
  out.values = std::move(sel.selected);
  out.method = EigMethod::Dense;
  return out;
}

EigSubspace shift_invert_eig(const CsrMatrix& a, const Preconditioner& m, Index k,
                             double tol) {
  const Index n = a.rows();
  const auto sa = to_eigen(a);
  const auto sm = to_eigen(preconditioner_matrix(a, m));
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(sa);
  lu.factorize(sa);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("smallest_eig_subspace: sparse LU of A failed");

  // Eigenvalues of A^{-1}M are 1/lambda for lambda those of M^{-1}A, with
  // the same eigenvectors; the wanted ones are the dominant ones.
  const Index p = std::min(n, std::max<Index>(3 * k + 10, 2 * k + 20));
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> nd;
  DenseMatrix x(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) x(i, j) = nd(rng);
  x = gram_schmidt_qr(x).q;

  EigSubspace out;
  out.method = EigMethod::ShiftInvert;
  constexpr Index kMaxSweeps = 2000;
  for (Index sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    DenseMatrix y = lu.solve(DenseMatrix(sm * x));
    const DenseMatrix bsmall = x.transpose() * y;
    Eigen::EigenSolver<DenseMatrix> es(bsmall, true);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("smallest_eig_subspace: projected eigensolver failed");
    const Eigen::VectorXcd mu = es.eigenvalues();
    Eigen::VectorXcd lambda(mu.size());
    for (Index i = 0; i < mu.size(); ++i)
      lambda[i] = mu[i] != 0.0 ? 1.0 / mu[i]
                               : std::complex<double>(std::numeric_limits<double>::infinity());
    const EigenSelection sel = smallest_magnitude_basis(lambda, es.eigenvectors(), k);

    // Ritz residuals ||op(X z) - mu X z|| / |mu| of the selected pairs.
    double worst = 0.0;
    const Eigen::MatrixXcd xc = x.cast<std::complex<double>>();
    const Eigen::MatrixXcd yc = y.cast<std::complex<double>>();
    for (const auto& lam : sel.selected) {
      Index idx = 0;
      (lambda.array() - lam).abs().minCoeff(&idx);
      const Eigen::VectorXcd z = es.eigenvectors().col(idx);
      const Eigen::VectorXcd v = xc * z;
      const double res = (yc * z - mu[idx] * v).norm() / (std::abs(mu[idx]) * v.norm());
      worst = std::max(worst, res);
    }
    out.iterations = sweep;
    out.max_residual = worst;
    if (worst <= tol || sweep == kMaxSweeps) {
      if (worst > tol)
        throw std::runtime_error("smallest_eig_subspace: shift-invert iteration did not converge");
      out.basis.q = gram_schmidt_qr(x * sel.basis, 1e-10).q;
      out.values = sel.selected;
      return out;
    }
    x = gram_schmidt_qr(y).q;
    if (x.cols() < p) {
      // invariant subspace smaller than p: pad with fresh random directions
      DenseMatrix pad(n, p);
      pad.leftCols(x.cols()) = x;
      for (Index j = x.cols(); j < p; ++j)
        for (Index i = 0; i < n; ++i) pad(i, j) = nd(rng);
      x = gram_schmidt_qr(pad).q;
    }
  }
  throw std::runtime_error("smallest_eig_subspace: unreachable");
}

}  // namespace

SubspaceBasis orthonormalize(const DenseMatrix& m, Index* dropped) {
  SubspaceBasis out;
  out.q = gram_schmidt_qr(m, 1e-12).q;
  if (dropped) *dropped = m.cols() - out.q.cols();
  return out;
}

double one_sided_distance(const SubspaceBasis& q, const SubspaceBasis& c) {
  if (q.dim() == 0) return 0.0;
  if (c.dim() == 0) return 1.0;
  if (q.ambient() != c.ambient())
    throw DimensionError("one_sided_distance: ambient dimensions differ");
  const DenseMatrix resid = q.q - c.q * (c.q.transpose() * q.q);
  Eigen::JacobiSVD<DenseMatrix> svd(resid);
  return std::clamp(svd.singularValues()[0], 0.0, 1.0);
}

EigSubspace smallest_eig_subspace(const CsrMatrix& a, const Preconditioner& m,
                                  Index k, EigMethod method, double tol) {
  if (a.rows() != a.cols()) throw DimensionError("smallest_eig_subspace: matrix not square");
  if (m.size() != a.rows()) throw DimensionError("smallest_eig_subspace: preconditioner size");
  if (k < 0) throw std::invalid_argument("smallest_eig_subspace: k must be >= 0");
  const Index n = a.rows();
  if (k == 0) {
    EigSubspace out;
    out.basis.q.resize(n, 0);
    return out;
  }
  if (method == EigMethod::Auto)
    method = n <= kDenseAutoLimit ? EigMethod::Dense : EigMethod::ShiftInvert;
  if (method == EigMethod::Dense) {
    if (n > kDenseEigCap)
      throw std::invalid_argument("smallest_eig_subspace: n = " + std::to_string(n) +
                                  " exceeds the dense cap of " +
                                  std::to_string(kDenseEigCap));
    return dense_eig(a, m, k);
  }
  if (3 * k + 10 >= n) return dense_eig(a, m, k);
  return shift_invert_eig(a, m, k, tol);
}

}  // namespace skr
