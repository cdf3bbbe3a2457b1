#pragma once

/// \file skr/problems.hpp
/// \brief Parameterized 2-D PDE instances discretized on structured grids.
///
/// Unknowns are ordered row-major, index j * nx + i, and every row is scaled
/// by dx * dy so the constant-coefficient Laplacian has stencil
/// (1, 1, -4, 1, 1) on a uniform grid.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "skr/sorting.hpp"
#include "skr/sparse.hpp"

namespace skr {

enum class ProblemKind { Poisson, Darcy, Helmholtz, Thermal };

std::string to_string(ProblemKind k);
ProblemKind parse_problem_kind(std::string_view s);

struct Grid {
  Index nx = 0;
  Index ny = 0;
  Index size() const { return nx * ny; }
  bool operator==(const Grid&) const = default;
};

struct LinearSystem {
  CsrMatrix a;
  Vector b;
  ParameterMatrix params;
  Grid grid;
  ProblemKind kind = ProblemKind::Poisson;
  Index id = 0;
  std::uint64_t seed = 0;
};

struct GrfSpec {
  double length_scale = 0.2;
  double variance = 1.0;
  std::uint64_t seed = 0;
  Index kl_rank = 16;

  void validate() const;
};

struct GrfSample {
  Vector field;  ///< nx * ny nodal values, row-major
  Vector xi;     ///< the kl_rank standard normal coefficients
};

/// Nodes of the unit square excluding the boundary: x_i = (i+1) / (nx+1).
std::vector<double> interior_nodes(Index n);

/// Zero-mean Gaussian field with squared-exponential covariance on the
/// interior nodes of `grid`, by truncated Karhunen-Loeve expansion. The
/// kernel is separable on a tensor grid, so the modes are products of 1-D
/// eigenvectors; the kl_rank largest products are kept.
GrfSample sample_grf(const Grid& grid, const GrfSpec& spec);

/// Same construction on an arbitrary 1-D point set.
GrfSample sample_grf_1d(const std::vector<double>& x, const GrfSpec& spec);

/// sum_j c_j T_j(t) on [-1, 1].
struct ChebyshevSeries {
  Vector coeffs;
  double operator()(double t) const;
};

/// Coefficients i.i.d. uniform on [-1, 1].
ChebyshevSeries sample_chebyshev(Index degree, std::uint64_t seed);

struct Domain {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};

using ScalarField = std::function<double(double, double)>;

/// Laplacian(u) = f with Dirichlet data g; boundary contributions moved to b.
LinearSystem assemble_poisson(Index nx, Index ny, const ScalarField& f,
                              const ScalarField& g, const Domain& dom = {});

/// Poisson instance from five seeded Chebyshev series: one per edge
/// (bottom, top, left, right) and the source f(x, y) = F(2x-1) F(2y-1).
/// params is the 5 x (degree+1) coefficient matrix.
LinearSystem random_poisson(Index nx, Index ny, Index degree, std::uint64_t seed);

/// -div(K grad h) = f_const, h = 0 on the boundary, K = exp(GRF).
/// Face permeabilities are harmonic means; a boundary face uses the
/// adjacent node's K. params = KL coefficients.
LinearSystem assemble_darcy(Index nx, Index ny, const GrfSpec& grf,
                            double f_const = 1.0);

/// Darcy operator for a given nodal permeability (length nx * ny).
CsrMatrix darcy_matrix(Index nx, Index ny, const Vector& k);

/// Laplacian(u) + k^2 u = 0 with k = k0 + GRF and Dirichlet data drawn from
/// a 1-D GRF on each edge (seeded by bc_seed). params stacks the wavenumber
/// KL coefficients and the four edge coefficient vectors.
LinearSystem assemble_helmholtz(Index nx, Index ny, const GrfSpec& grf, double k0,
                                std::uint64_t bc_seed,
                                const GrfSpec& bc_grf = {0.2, 1.0, 0, 8});

/// Helmholtz operator for a given nodal wavenumber field.
CsrMatrix helmholtz_matrix(Index nx, Index ny, const Vector& k);

/// Laplace equation on [0,1]^2 with T = t_left at x = 0, T = t_right at
/// x = 1 and insulated top and bottom. The grid has nx interior x-nodes and
/// ny y-nodes including both insulated edges, whose rows are the one-sided
/// second-order difference -3u_0 + 4u_1 - u_2 = 0. Requires ny >= 3.
LinearSystem assemble_thermal(Index nx, Index ny, double t_left, double t_right);

/// Thermal instance with t_left ~ U(-100, 0), t_right ~ U(0, 100).
LinearSystem random_thermal(Index nx, Index ny, std::uint64_t seed);

struct ProblemSpec {
  GrfSpec grf;                  ///< Darcy log-permeability / Helmholtz wavenumber
  Index chebyshev_degree = 8;
  double darcy_source = 1.0;
  double helmholtz_k0 = 10.0;
  GrfSpec helmholtz_bc{0.2, 1.0, 0, 8};
};

/// Per-system seed derived from (base_seed, index).
std::uint64_t system_seed(std::uint64_t base_seed, Index index);

/// One system of a batch; equals element `index` of generate_batch.
LinearSystem generate_system(ProblemKind kind, const Grid& grid,
                             std::uint64_t base_seed, Index index,
                             const ProblemSpec& spec = {});

std::vector<LinearSystem> generate_batch(ProblemKind kind, Index n_systems,
                                         const Grid& grid, std::uint64_t base_seed,
                                         const ProblemSpec& spec = {});

}  // namespace skr
