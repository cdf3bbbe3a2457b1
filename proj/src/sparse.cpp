#include "skr/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace skr {

namespace {

// Below this length the fork/join overhead dominates.
constexpr Index kParallelMin = 8192;

void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace

CsrMatrix::CsrMatrix(Index n_rows, Index n_cols, std::vector<Index> row_ptr,
                     std::vector<Index> col_idx, std::vector<double> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (n_rows_ < 0 || n_cols_ < 0)
    throw std::invalid_argument("CsrMatrix: negative dimension");
  if (static_cast<Index>(row_ptr_.size()) != n_rows_ + 1 || row_ptr_[0] != 0)
    throw std::invalid_argument("CsrMatrix: bad row_ptr");
  if (col_idx_.size() != values_.size() ||
      row_ptr_.back() != static_cast<Index>(values_.size()))
    throw std::invalid_argument("CsrMatrix: row_ptr/col_idx/values mismatch");
  for (Index i = 0; i < n_rows_; ++i) {
    if (row_ptr_[i + 1] < row_ptr_[i])
      throw std::invalid_argument("CsrMatrix: row_ptr decreasing");
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (col_idx_[p] < 0 || col_idx_[p] >= n_cols_)
        throw std::invalid_argument("CsrMatrix: column index out of range");
      if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])
        throw std::invalid_argument("CsrMatrix: columns not strictly increasing");
      if (!std::isfinite(values_[p]))
        throw std::invalid_argument("CsrMatrix: non-finite value");
    }
  }
}

Index CsrMatrix::find(Index i, Index j) const {
  auto first = col_idx_.begin() + row_ptr_[i];
  auto last = col_idx_.begin() + row_ptr_[i + 1];
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return static_cast<Index>(it - col_idx_.begin());
}

double CsrMatrix::coeff(Index i, Index j) const {
  Index p = find(i, j);
  return p < 0 ? 0.0 : values_[p];
}

std::vector<Triplet> CsrMatrix::to_triplets() const {
  std::vector<Triplet> out;
  out.reserve(values_.size());
  for (Index i = 0; i < n_rows_; ++i)
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      out.push_back({i, col_idx_[p], values_[p]});
  return out;
}

DenseMatrix CsrMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(n_rows_, n_cols_);
  for (Index i = 0; i < n_rows_; ++i)
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      d(i, col_idx_[p]) = values_[p];
  return d;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (Index i = 0; i < n_rows_; ++i)
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      t.push_back({col_idx_[p], i, values_[p]});
  return assemble_csr(t, n_cols_, n_rows_);
}

Vector CsrMatrix::diagonal() const {
  Index n = std::min(n_rows_, n_cols_);
  Vector d = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) d[i] = coeff(i, i);
  return d;
}

double CsrMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

CsrMatrix assemble_csr(std::span<const Triplet> triplets, Index n_rows,
                       Index n_cols) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols) {
      std::ostringstream msg;
      msg << "assemble_csr: triplet (" << t.row << ", " << t.col << ", "
          << t.value << ") outside " << n_rows << "x" << n_cols;
      throw std::out_of_range(msg.str());
    }
  }
  std::vector<Index> order(triplets.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const auto& ta = triplets[a];
    const auto& tb = triplets[b];
    return ta.row != tb.row ? ta.row < tb.row : ta.col < tb.col;
  });

  std::vector<Index> row_ptr(n_rows + 1, 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  Index last_row = -1, last_col = -1;
  for (Index k : order) {
    const auto& t = triplets[k];
    if (t.row == last_row && t.col == last_col) {
      values.back() += t.value;
      continue;
    }
    col_idx.push_back(t.col);
    values.push_back(t.value);
    ++row_ptr[t.row + 1];
    last_row = t.row;
    last_col = t.col;
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  return CsrMatrix(n_rows, n_cols, std::move(row_ptr), std::move(col_idx),
                   std::move(values));
}

CsrMatrix identity_csr(Index n) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return assemble_csr(t, n, n);
}

CsrMatrix from_dense(const DenseMatrix& dense, double drop_tol) {
  std::vector<Triplet> t;
  for (Index i = 0; i < dense.rows(); ++i)
    for (Index j = 0; j < dense.cols(); ++j)
      if (std::abs(dense(i, j)) > drop_tol) t.push_back({i, j, dense(i, j)});
  return assemble_csr(t, dense.rows(), dense.cols());
}

bool is_symmetric(const CsrMatrix& a) {
  if (a.rows() != a.cols()) return false;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) {
      Index j = a.col_idx()[p];
      Index q = a.find(j, i);
      if (q < 0 || a.values()[q] != a.values()[p]) return false;
    }
  }
  return true;
}

// --- parallel kernels ------------------------------------------------------

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  require(static_cast<Index>(x.size()) == a.cols(), "spmv: x length != cols");
  require(static_cast<Index>(y.size()) == a.rows(), "spmv: y length != rows");
  const Index* rp = a.row_ptr().data();
  const Index* ci = a.col_idx().data();
  const double* va = a.values().data();
  const Index n = a.rows();
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Index p = rp[i]; p < rp[i + 1]; ++p) s += va[p] * x[ci[p]];
    y[i] = s;
  }
}

Vector spmv(const CsrMatrix& a, const Vector& x) {
  Vector y(a.rows());
  spmv(a, as_span(x), as_span(y));
  return y;
}

double dot(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "dot: length mismatch");
  const Index n = static_cast<Index>(x.size());
  double s = 0.0;
#pragma omp parallel for reduction(+ : s) schedule(static) if (n >= kParallelMin)
  for (Index i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require(x.size() == y.size(), "axpy: length mismatch");
  const Index n = static_cast<Index>(x.size());
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (Index i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double dot(const Vector& x, const Vector& y) {
  return dot(as_span(x), as_span(y));
}
double norm2(const Vector& x) { return norm2(as_span(x)); }

Vector axpy(double alpha, const Vector& x, const Vector& y) {
  Vector out = y;
  axpy(alpha, as_span(x), as_span(out));
  return out;
}

void gemv_sub(const DenseMatrix& v, std::span<const double> c,
              std::span<double> y) {
  require(static_cast<Index>(y.size()) == v.rows(), "gemv_sub: length");
  require(static_cast<Index>(c.size()) <= v.cols(), "gemv_sub: too many cols");
  const Index n = v.rows();
  const Index m = static_cast<Index>(c.size());
  const double* vd = v.data();
#pragma omp parallel for schedule(static) if (n * m >= kParallelMin)
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Index j = 0; j < m; ++j) s += vd[i + j * n] * c[j];
    y[i] -= s;
  }
}

void gemv_t(const DenseMatrix& v, Index cols, std::span<const double> y,
            std::span<double> c) {
  require(static_cast<Index>(y.size()) == v.rows(), "gemv_t: length");
  require(cols <= v.cols() && static_cast<Index>(c.size()) >= cols,
          "gemv_t: cols");
  for (Index j = 0; j < cols; ++j) c[j] = dot(column(v, j), y);
}

namespace serial {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  require(static_cast<Index>(x.size()) == a.cols(), "spmv: x length != cols");
  require(static_cast<Index>(y.size()) == a.rows(), "spmv: y length != rows");
  auto rp = a.row_ptr();
  auto ci = a.col_idx();
  auto va = a.values();
  for (Index i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (Index p = rp[i]; p < rp[i + 1]; ++p) s += va[p] * x[ci[p]];
    y[i] = s;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require(x.size() == y.size(), "axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace serial

}  // namespace skr
