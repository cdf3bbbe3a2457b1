#pragma once

/// \file skr/harness.hpp
/// \brief Batch benchmark of restarted GMRES against sorted recycling
///        (SKR), the sort ablation, and dataset export.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "skr/gcrodr.hpp"
#include "skr/precond.hpp"
#include "skr/problems.hpp"

namespace skr {

enum class SortMode { Sorted, Unsorted, Grouped };

std::string to_string(SortMode m);
SortMode parse_sort_mode(std::string_view s);

struct BenchmarkConfig {
  ProblemKind kind = ProblemKind::Darcy;
  std::vector<Grid> grids{{50, 50}};
  std::vector<double> tolerances{1e-8};
  std::vector<PrecondKind> preconditioners{PrecondKind::Sor};
  Index n_systems = 50;
  Index m = 50;
  Index k = 10;
  Index max_iter = 10000;
  std::uint64_t seed = 42;
  SortMode sort_mode = SortMode::Sorted;
  Index group_size = 1000;
  double sor_omega = 1.0;
  Index bjacobi_block = 64;
  ProblemSpec problem;
  /// Eigenvectors per system for the ablation's delta (defaults to k).
  Index ablation_eig_k = -1;
  /// Seed of the fixed random permutation used as the unsorted ordering.
  std::uint64_t shuffle_seed = 7;
  std::string output_dir = "results";

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  SolverConfig solver_config(double tol) const;
  PrecondOptions precond_options(PrecondKind kind) const;

  /// Unknown keys are rejected. Missing keys keep their defaults.
  static BenchmarkConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

BenchmarkConfig load_config(const std::filesystem::path& path);

/// FNV-1a over the CSR arrays.
std::uint64_t matrix_hash(const CsrMatrix& a);

struct SolveRecord {
  Grid grid;
  double tol = 0.0;
  PrecondKind precond = PrecondKind::None;
  std::string solver;         ///< "gmres" or "skr"
  Index system_id = 0;
  Index position = 0;         ///< place in that solver's solve order
  Index iterations = 0;
  double wall_time = 0.0;
  bool converged = false;
  bool timed_out = false;
  bool failed = false;        ///< hard failure (e.g. zero pivot); counted as a timeout
  double true_relative_residual = 0.0;
  double preconditioned_relative_residual = 0.0;
  double precond_time = 0.0;
  std::uint64_t matrix_hash = 0;
  std::string note;
};

struct TableRow {
  Grid grid;
  double tol = 0.0;
  PrecondKind precond = PrecondKind::None;
  double gmres_time = 0.0;     ///< mean seconds per solve
  double skr_time = 0.0;
  double gmres_iterations = 0.0;
  double skr_iterations = 0.0;
  double time_ratio = 0.0;     ///< GMRES / SKR
  double iteration_ratio = 0.0;
  Index gmres_timeouts = 0;
  Index skr_timeouts = 0;
  double assembly_time = 0.0;  ///< batch total
  double sort_time = 0.0;
  double precond_time = 0.0;   ///< batch total
};

struct BenchmarkResult {
  std::vector<TableRow> table;
  std::vector<SolveRecord> raw;
  /// SKR order per grid (same order for every cell of that grid).
  std::vector<std::vector<Index>> solve_orders;
};

/// Per-system iteration value used in means: max_iter for timeouts and
/// failures, the iteration count otherwise.
double effective_iterations(const SolveRecord& r, Index max_iter);

/// Aggregates raw records of one cell into a table row.
TableRow aggregate_cell(const std::vector<SolveRecord>& cell, Index max_iter);

/// SKR solve order for a batch under `mode`.
std::vector<Index> solve_order(const std::vector<LinearSystem>& batch, SortMode mode,
                               Index group_size, std::uint64_t shuffle_seed);

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg);

struct AblationRecord {
  std::string ordering;  ///< "sorted" or "unsorted"
  Index position = 0;
  Index system_id = 0;
  /// delta between the system's smallest-eigenvalue subspace and the
  /// incoming recycle space C after refresh; NaN for the first system.
  double delta = 0.0;
  Index iterations = 0;
  double wall_time = 0.0;
  bool converged = false;
  double true_relative_residual = 0.0;
};

struct AblationSummary {
  std::string ordering;
  double mean_delta = 0.0;
  double mean_iterations = 0.0;
  double mean_time = 0.0;
  Index timeouts = 0;
};

struct AblationResult {
  std::vector<AblationRecord> records;
  std::vector<AblationSummary> summary;  ///< sorted first, then unsorted
};

/// Uses the first grid, tolerance and preconditioner of `cfg`.
AblationResult run_ablation(const BenchmarkConfig& cfg);

/// Writes sys_XXXX.mtx / _rhs.txt / _x.txt / _params.csv per system plus
/// manifest.json; returns the manifest path. Throws io::IoError naming the
/// path on failure.
std::filesystem::path export_dataset(const std::vector<LinearSystem>& batch,
                                     const std::vector<SolveReport>& reports,
                                     const std::vector<Index>& order,
                                     const std::filesystem::path& dir,
                                     const nlohmann::json& config = nlohmann::json::object());

void write_table_csv(const std::filesystem::path& path, const std::vector<TableRow>& rows);
void write_raw_csv(const std::filesystem::path& path, const std::vector<SolveRecord>& rows);
void write_ablation_csv(const std::filesystem::path& path, const AblationResult& res);

}  // namespace skr
