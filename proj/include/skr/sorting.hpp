#pragma once

/// \file skr/sorting.hpp
/// \brief Ordering a batch of systems so that neighbours are similar in
///        parameter space.

#include <vector>

#include "skr/sparse.hpp"

namespace skr {

/// Generative parameters of one system. A vector is stored as p x 1.
struct ParameterMatrix {
  DenseMatrix values;
  Index problem_id = 0;
};

/// ||P - Q||_F. Throws DimensionError on shape mismatch.
double frobenius_distance(const ParameterMatrix& p, const ParameterMatrix& q);

/// Greedy nearest-neighbour tour starting at index 0. Ties go to the
/// smallest index. Empty input gives an empty permutation.
std::vector<Index> greedy_sort(const std::vector<ParameterMatrix>& params);

/// Splits the batch into contiguous groups of at most `group_size` along the
/// first principal coordinate of the flattened parameters, greedy-sorts each
/// group and concatenates. Throws std::invalid_argument if group_size < 2.
std::vector<Index> grouped_sort(const std::vector<ParameterMatrix>& params,
                                Index group_size);

/// First principal coordinate of each flattened parameter matrix. The sign is
/// fixed so the largest-magnitude loading is positive.
Vector principal_coordinate(const std::vector<ParameterMatrix>& params);

/// Sum of consecutive distances along `order`.
double path_length(const std::vector<ParameterMatrix>& params,
                   const std::vector<Index>& order);

bool is_permutation_of_range(const std::vector<Index>& order, Index n);

}  // namespace skr
