// skr: benchmark, ablation, dataset generation and single solves.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "skr/gcrodr.hpp"
#include "skr/harness.hpp"
#include "skr/io.hpp"

namespace fs = std::filesystem;
using namespace skr;

namespace {

void write_resolved_config(const BenchmarkConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream out(dir / "config.json");
  out << cfg.to_json().dump(2) << '\n';
}

int cmd_bench(const std::string& config_path, const std::string& out_override) {
  BenchmarkConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  const fs::path dir = cfg.output_dir;
  write_resolved_config(cfg, dir);
  const auto res = run_benchmark(cfg);
  write_table_csv(dir / "table.csv", res.table);
  write_raw_csv(dir / "raw_solves.csv", res.raw);
  std::printf("%-9s %-6s %-8s %10s %10s %10s %10s %8s %8s\n", "grid", "tol", "precond",
              "gmres_it", "skr_it", "it_ratio", "t_ratio", "gm_to", "skr_to");
  for (const auto& r : res.table)
    std::printf("%4ldx%-4ld %-6.0e %-8s %10.1f %10.1f %10.2f %10.2f %8ld %8ld\n", r.grid.nx,
                r.grid.ny, r.tol, std::string(to_string(r.precond)).c_str(), r.gmres_iterations,
                r.skr_iterations, r.iteration_ratio, r.time_ratio, r.gmres_timeouts,
                r.skr_timeouts);
  std::printf("wrote %s and %s\n", (dir / "table.csv").c_str(), (dir / "raw_solves.csv").c_str());
  return 0;
}

int cmd_ablate(const std::string& config_path, const std::string& out_override) {
  BenchmarkConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  const fs::path dir = cfg.output_dir;
  write_resolved_config(cfg, dir);
  const auto res = run_ablation(cfg);
  write_ablation_csv(dir / "ablation.csv", res);
  std::printf("%-9s %10s %12s %10s %8s\n", "ordering", "mean_delta", "mean_iters", "mean_time",
              "timeouts");
  for (const auto& s : res.summary)
    std::printf("%-9s %10.4f %12.2f %10.4f %8ld\n", s.ordering.c_str(), s.mean_delta,
                s.mean_iterations, s.mean_time, s.timeouts);
  std::printf("wrote %s\n", (dir / "ablation.csv").c_str());
  return 0;
}

struct GenArgs {
  std::string kind = "darcy";
  Index grid = 32;
  Index n = 10;
  std::uint64_t seed = 42;
  std::string out = "dataset";
  std::string precond = "sor";
  std::string sort = "sorted";
  double tol = 1e-8;
  Index m = 50;
  Index k = 10;
  Index max_iter = 10000;
};

int cmd_gen(const GenArgs& a) {
  BenchmarkConfig cfg;
  cfg.kind = parse_problem_kind(a.kind);
  cfg.grids = {{a.grid, a.grid}};
  cfg.n_systems = a.n;
  cfg.seed = a.seed;
  cfg.tolerances = {a.tol};
  cfg.preconditioners = {parse_precond_kind(a.precond)};
  cfg.sort_mode = parse_sort_mode(a.sort);
  cfg.m = a.m;
  cfg.k = a.k;
  cfg.max_iter = a.max_iter;
  cfg.output_dir = a.out;
  cfg.validate();

  const auto batch = generate_batch(cfg.kind, cfg.n_systems, cfg.grids[0], cfg.seed, cfg.problem);
  const auto order = solve_order(batch, cfg.sort_mode, cfg.group_size, cfg.shuffle_seed);
  std::vector<SolveReport> reports(batch.size());
  RecycleSpace recycle;
  Index not_converged = 0;
  for (Index id : order) {
    const auto& sys = batch[id];
    const auto m = build_preconditioner(sys.a, cfg.precond_options(cfg.preconditioners[0]));
    auto res = gcrodr_solve(sys.a, sys.b, Vector::Zero(sys.b.size()), m,
                            cfg.solver_config(a.tol), recycle.empty() ? nullptr : &recycle);
    recycle = std::move(res.recycle);
    if (!res.report.converged) ++not_converged;
    reports[id] = std::move(res.report);
  }
  const auto manifest = export_dataset(batch, reports, order, a.out, cfg.to_json());
  std::printf("%zu systems written; manifest %s", batch.size(), manifest.c_str());
  if (not_converged) std::printf(" (%ld not converged)", not_converged);
  std::printf("\n");
  return 0;
}

struct SolveArgs {
  std::string matrix, rhs, solver = "gcrodr", precond = "none", x_out;
  double tol = 1e-8;
  Index m = 50;
  Index k = 10;
  Index max_iter = 10000;
};

int cmd_solve(const SolveArgs& a) {
  const CsrMatrix mat = io::read_matrix_market(fs::path(a.matrix));
  const Vector b = io::read_vector(fs::path(a.rhs));
  const auto m = build_preconditioner(mat, parse_precond_kind(a.precond));
  SolverConfig cfg;
  cfg.tol = a.tol;
  cfg.m = a.m;
  cfg.k = a.k;
  cfg.max_iter = a.max_iter;
  const Vector x0 = Vector::Zero(b.size());
  SolveReport rep;
  if (a.solver == "gmres") {
    rep = gmres_solve(mat, b, x0, m, cfg);
  } else if (a.solver == "gcrodr") {
    rep = gcrodr_solve(mat, b, x0, m, cfg).report;
  } else {
    throw std::invalid_argument("--solver must be gmres or gcrodr");
  }
  std::printf("solver %s precond %s n %ld\n", a.solver.c_str(), a.precond.c_str(), mat.rows());
  std::printf("converged %s iterations %ld time %.4fs\n", rep.converged ? "yes" : "no",
              rep.iterations, rep.wall_time);
  std::printf("preconditioned residual %.3e true residual %.3e\n",
              rep.preconditioned_relative_residual, rep.true_relative_residual);
  for (const auto& n : rep.notes) std::printf("note: %s\n", n.c_str());
  if (!a.x_out.empty()) io::write_vector(fs::path(a.x_out), rep.x);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sorted Krylov recycling for sequences of sparse linear systems"};
  app.require_subcommand(1);

  std::string config, out;
  auto* bench = app.add_subcommand("bench", "GMRES vs SKR over a tolerance x preconditioner x size grid");
  bench->add_option("--config", config, "JSON config")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", out, "override output_dir");

  auto* ablate = app.add_subcommand("ablate", "sorted vs unsorted recycling with subspace distances");
  ablate->add_option("--config", config, "JSON config")->required()->check(CLI::ExistingFile);
  ablate->add_option("--out", out, "override output_dir");

  GenArgs g;
  auto* gen = app.add_subcommand("gen", "generate, sort, solve and export a dataset");
  gen->add_option("--kind", g.kind, "poisson|darcy|helmholtz|thermal")->capture_default_str();
  gen->add_option("--grid", g.grid, "interior nodes per side")->capture_default_str();
  gen->add_option("--n", g.n, "number of systems")->capture_default_str();
  gen->add_option("--seed", g.seed, "base seed")->capture_default_str();
  gen->add_option("--out", g.out, "dataset directory")->capture_default_str();
  gen->add_option("--precond", g.precond, "preconditioner")->capture_default_str();
  gen->add_option("--sort", g.sort, "sorted|unsorted|grouped")->capture_default_str();
  gen->add_option("--tol", g.tol)->capture_default_str();
  gen->add_option("--m", g.m)->capture_default_str();
  gen->add_option("--k", g.k)->capture_default_str();
  gen->add_option("--max-iter", g.max_iter)->capture_default_str();

  SolveArgs s;
  auto* solve = app.add_subcommand("solve", "solve one Matrix Market system");
  solve->add_option("--matrix", s.matrix, "Matrix Market file")->required()->check(CLI::ExistingFile);
  solve->add_option("--rhs", s.rhs, "right-hand side, one value per line")->required()->check(CLI::ExistingFile);
  solve->add_option("--solver", s.solver, "gmres|gcrodr")->capture_default_str();
  solve->add_option("--tol", s.tol)->capture_default_str();
  solve->add_option("--m", s.m)->capture_default_str();
  solve->add_option("--k", s.k)->capture_default_str();
  solve->add_option("--max-iter", s.max_iter)->capture_default_str();
  solve->add_option("--precond", s.precond)->capture_default_str();
  solve->add_option("--x-out", s.x_out, "write the solution here");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*bench) return cmd_bench(config, out);
    if (*ablate) return cmd_ablate(config, out);
    if (*gen) return cmd_gen(g);
    if (*solve) return cmd_solve(s);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
