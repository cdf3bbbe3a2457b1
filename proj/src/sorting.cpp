#include "skr/sorting.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/SVD>

namespace skr {

namespace {

void check_shapes(const std::vector<ParameterMatrix>& params) {
  for (const auto& p : params) {
    if (p.values.rows() != params.front().values.rows() ||
        p.values.cols() != params.front().values.cols())
      throw DimensionError("sorting: inconsistent parameter shapes in batch");
  }
}

/// Greedy tour over the subset `ids`, seeded at ids[0].
std::vector<Index> greedy_over(const std::vector<ParameterMatrix>& params,
                               std::vector<Index> ids) {
  std::vector<Index> order;
  if (ids.empty()) return order;
  std::sort(ids.begin(), ids.end());
  const std::size_t n = ids.size();
  order.reserve(n);
  std::vector<bool> used(n, false);
  std::size_t cur = 0;
  used[0] = true;
  order.push_back(ids[0]);
  std::vector<double> dist(n);
  for (std::size_t step = 1; step < n; ++step) {
#pragma omp parallel for schedule(static) if (n >= 512)
    for (std::size_t j = 0; j < n; ++j)
      dist[j] = used[j] ? std::numeric_limits<double>::infinity()
                        : frobenius_distance(params[ids[cur]], params[ids[j]]);
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      if (best == n || dist[j] < best_d) {
        best = j;
        best_d = dist[j];
      }
    }
    used[best] = true;
    order.push_back(ids[best]);
    cur = best;
  }
  return order;
}

}  // namespace

double frobenius_distance(const ParameterMatrix& p, const ParameterMatrix& q) {
  if (p.values.rows() != q.values.rows() || p.values.cols() != q.values.cols())
    throw DimensionError("frobenius_distance: shape mismatch");
  return (p.values - q.values).norm();
}

std::vector<Index> greedy_sort(const std::vector<ParameterMatrix>& params) {
  check_shapes(params);
  std::vector<Index> ids(params.size());
  std::iota(ids.begin(), ids.end(), Index{0});
  return greedy_over(params, std::move(ids));
}

Vector principal_coordinate(const std::vector<ParameterMatrix>& params) {
  check_shapes(params);
  const Index n = static_cast<Index>(params.size());
  if (n == 0) return Vector();
  const Index p = params.front().values.size();
  DenseMatrix x(n, p);
  for (Index i = 0; i < n; ++i)
    x.row(i) = params[i].values.reshaped().transpose();
  x.rowwise() -= x.colwise().mean();
  if (n == 1 || x.norm() == 0.0) return Vector::Zero(n);
  Eigen::JacobiSVD<DenseMatrix> svd(x, Eigen::ComputeThinV);
  Vector v = svd.matrixV().col(0);
  Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0) v = -v;
  return x * v;
}

std::vector<Index> grouped_sort(const std::vector<ParameterMatrix>& params,
                                Index group_size) {
  if (group_size < 2) throw std::invalid_argument("grouped_sort: group_size must be >= 2");
  const Index n = static_cast<Index>(params.size());
  if (group_size >= n) return greedy_sort(params);
  const Vector key = principal_coordinate(params);
  std::vector<Index> by_key(n);
  std::iota(by_key.begin(), by_key.end(), Index{0});
  std::stable_sort(by_key.begin(), by_key.end(),
                   [&](Index a, Index b) { return key[a] < key[b]; });
  std::vector<Index> out;
  out.reserve(n);
  for (Index start = 0; start < n; start += group_size) {
    const Index end = std::min(n, start + group_size);
    std::vector<Index> group(by_key.begin() + start, by_key.begin() + end);
    for (Index id : greedy_over(params, std::move(group))) out.push_back(id);
  }
  return out;
}

double path_length(const std::vector<ParameterMatrix>& params,
                   const std::vector<Index>& order) {
  double total = 0.0;
  for (std::size_t i = 1; i < order.size(); ++i)
    total += frobenius_distance(params[order[i - 1]], params[order[i]]);
  return total;
}

bool is_permutation_of_range(const std::vector<Index>& order, Index n) {
  if (static_cast<Index>(order.size()) != n) return false;
  std::vector<bool> seen(n, false);
  for (Index i : order) {
    if (i < 0 || i >= n || seen[i]) return false;
    seen[i] = true;
  }
  return true;
}

}  // namespace skr
