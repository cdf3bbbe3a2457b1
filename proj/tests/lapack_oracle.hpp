#pragma once

// Eigenpairs from LAPACK's dgeev, used as an oracle independent of Eigen.

#include <complex>
#include <stdexcept>
#include <vector>

#include <lapacke.h>

#include "skr/sparse.hpp"

namespace skr::test {

struct DenseEig {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;
};

inline DenseEig lapack_eig(const DenseMatrix& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  DenseMatrix work = a;
  std::vector<double> wr(n), wi(n);
  DenseMatrix vr(n, n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, work.data(), n,
                                        wr.data(), wi.data(), nullptr, 1, vr.data(), n);
  if (info != 0) throw std::runtime_error("dgeev failed");
  DenseEig out{Eigen::VectorXcd(n), Eigen::MatrixXcd(n, n)};
  for (lapack_int j = 0; j < n; ++j) {
    out.values[j] = {wr[j], wi[j]};
    if (wi[j] == 0.0) {
      out.vectors.col(j) = vr.col(j).cast<std::complex<double>>();
    } else if (wi[j] > 0.0) {
      for (lapack_int i = 0; i < n; ++i) {
        out.vectors(i, j) = {vr(i, j), vr(i, j + 1)};
        out.vectors(i, j + 1) = {vr(i, j), -vr(i, j + 1)};
      }
    }
  }
  return out;
}

/// Eigenvalues of the pencil (A, B) from dggev; infinite ones reported as inf.
inline Eigen::VectorXcd lapack_generalized_eigenvalues(const DenseMatrix& a,
                                                       const DenseMatrix& b) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  DenseMatrix aa = a, bb = b;
  std::vector<double> ar(n), ai(n), be(n);
  const lapack_int info =
      LAPACKE_dggev(LAPACK_COL_MAJOR, 'N', 'N', n, aa.data(), n, bb.data(), n, ar.data(),
                    ai.data(), be.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw std::runtime_error("dggev failed");
  Eigen::VectorXcd out(n);
  for (lapack_int j = 0; j < n; ++j)
    out[j] = be[j] != 0.0 ? std::complex<double>(ar[j], ai[j]) / be[j]
                          : std::complex<double>(std::numeric_limits<double>::infinity(), 0.0);
  return out;
}

}  // namespace skr::test
