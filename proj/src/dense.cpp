#include "skr/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace skr {

namespace {

Index conjugate_partner(const Eigen::VectorXcd& theta, Index i) {
  Index best = -1;
  double dist = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < theta.size(); ++j) {
    if (j == i || theta[j].imag() * theta[i].imag() >= 0.0) continue;
    const double d = std::abs(theta[j] - std::conj(theta[i]));
    if (d < dist) {
      dist = d;
      best = j;
    }
  }
  return best;
}

}  // namespace

EigenSelection smallest_magnitude_basis(const Eigen::VectorXcd& theta,
                                        const Eigen::MatrixXcd& z, Index k) {
  EigenSelection out;
  const Index p = theta.size();
  const Index rows = z.rows();
  k = std::min(k, p);
  if (k <= 0) {
    out.basis.resize(rows, 0);
    return out;
  }

  std::vector<Index> order(p);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double ma = std::abs(theta[a]);
    const double mb = std::abs(theta[b]);
    if (ma != mb) return ma < mb;
    return theta[a].imag() > theta[b].imag();
  });

  std::vector<Index> chosen(order.begin(), order.begin() + k);
  const Index last = chosen.back();
  if (theta[last].imag() != 0.0) {
    const Index partner = conjugate_partner(theta, last);
    if (partner >= 0 &&
        std::find(chosen.begin(), chosen.end(), partner) == chosen.end())
      chosen.push_back(partner);
  }

  DenseMatrix cols(rows, 0);
  auto append = [&](const Vector& v) {
    cols.conservativeResize(rows, cols.cols() + 1);
    cols.col(cols.cols() - 1) = v;
  };
  std::vector<bool> done(p, false);
  for (Index i : chosen) {
    out.selected.push_back(theta[i]);
    if (done[i]) continue;
    done[i] = true;
    if (theta[i].imag() == 0.0) {
      append(z.col(i).real());
    } else {
      append(z.col(i).real());
      append(z.col(i).imag());
      const Index partner = conjugate_partner(theta, i);
      if (partner >= 0) done[partner] = true;
    }
  }
  out.basis = gram_schmidt_qr(cols, 1e-10).q;
  return out;
}

ThinQr gram_schmidt_qr(const DenseMatrix& m, double rel_tol) {
  const Index n = m.rows();
  const Index d = m.cols();
  double scale = 0.0;
  for (Index j = 0; j < d; ++j) scale = std::max(scale, m.col(j).norm());

  ThinQr out;
  out.q.resize(n, d);
  DenseMatrix r_full = DenseMatrix::Zero(d, d);
  Index rank = 0;
  if (scale == 0.0) {
    out.q.resize(n, 0);
    out.r.resize(0, 0);
    return out;
  }
  for (Index j = 0; j < d; ++j) {
    Vector w = m.col(j);
    Vector coef = Vector::Zero(rank);
    for (int pass = 0; pass < 2; ++pass) {
      if (rank == 0) break;
      Vector c = out.q.leftCols(rank).transpose() * w;
      w.noalias() -= out.q.leftCols(rank) * c;
      coef += c;
    }
    const double nw = w.norm();
    if (nw <= rel_tol * scale) continue;
    out.q.col(rank) = w / nw;
    r_full.block(0, rank, rank, 1) = coef;
    r_full(rank, rank) = nw;
    out.kept.push_back(j);
    ++rank;
  }
  out.q.conservativeResize(n, rank);
  out.r = r_full.topLeftCorner(rank, rank);
  return out;
}

DenseMatrix select_columns(const DenseMatrix& m, const std::vector<Index>& idx) {
  DenseMatrix out(m.rows(), static_cast<Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) out.col(c) = m.col(idx[c]);
  return out;
}

double orthogonality_error(const DenseMatrix& q) {
  return (q.transpose() * q - DenseMatrix::Identity(q.cols(), q.cols())).norm();
}

}  // namespace skr
