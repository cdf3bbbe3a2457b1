#include "skr/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>

#include "skr/io.hpp"
#include "skr/metrics.hpp"

namespace skr {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string grid_label(const Grid& g) {
  return std::to_string(g.nx) + "x" + std::to_string(g.ny);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw io::IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path);
  if (!out) throw io::IoError("cannot open " + path.string() + " for writing");
  return out;
}

GrfSpec grf_from_json(const json& j, GrfSpec g) {
  for (const auto& [key, val] : j.items()) {
    if (key == "length_scale") g.length_scale = val.get<double>();
    else if (key == "variance") g.variance = val.get<double>();
    else if (key == "kl_rank") g.kl_rank = val.get<Index>();
    else throw std::invalid_argument("config: unknown grf key '" + key + "'");
  }
  return g;
}

json grf_to_json(const GrfSpec& g) {
  return {{"length_scale", g.length_scale}, {"variance", g.variance}, {"kl_rank", g.kl_rank}};
}

SolveRecord base_record(const LinearSystem& sys, double tol, PrecondKind pk,
                        const char* solver, Index position, std::uint64_t hash) {
  SolveRecord r;
  r.grid = sys.grid;
  r.tol = tol;
  r.precond = pk;
  r.solver = solver;
  r.system_id = sys.id;
  r.position = position;
  r.matrix_hash = hash;
  return r;
}

void fill_from_report(SolveRecord& r, const SolveReport& rep, Index max_iter) {
  r.iterations = rep.iterations;
  r.wall_time = rep.wall_time;
  r.converged = rep.converged;
  r.timed_out = !rep.converged && rep.iterations >= max_iter;
  // stopped short of both the tolerance and the cap: treat as a failure
  r.failed = !rep.converged && !r.timed_out;
  r.true_relative_residual = rep.true_relative_residual;
  r.preconditioned_relative_residual = rep.preconditioned_relative_residual;
  for (const auto& n : rep.notes) r.note += (r.note.empty() ? "" : "; ") + n;
}

struct BuiltPreconditioners {
  std::vector<std::optional<Preconditioner>> m;
  std::vector<std::string> error;
  std::vector<double> time;
};

BuiltPreconditioners build_all(const std::vector<LinearSystem>& batch,
                               const PrecondOptions& opts) {
  BuiltPreconditioners out;
  const Index n = static_cast<Index>(batch.size());
  out.m.resize(n);
  out.error.resize(n);
  out.time.resize(n, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (Index i = 0; i < n; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      out.m[i] = build_preconditioner(batch[i].a, opts);
    } catch (const std::exception& e) {
      out.error[i] = e.what();
    }
    out.time[i] = seconds_since(t0);
  }
  return out;
}

}  // namespace

std::string to_string(SortMode m) {
  switch (m) {
    case SortMode::Sorted: return "sorted";
    case SortMode::Unsorted: return "unsorted";
    case SortMode::Grouped: return "grouped";
  }
  return "?";
}

SortMode parse_sort_mode(std::string_view s) {
  if (s == "sorted") return SortMode::Sorted;
  if (s == "unsorted") return SortMode::Unsorted;
  if (s == "grouped") return SortMode::Grouped;
  throw std::invalid_argument("unknown sort_mode '" + std::string(s) + "'");
}

void BenchmarkConfig::validate() const {
  if (grids.empty()) throw std::invalid_argument("config: grids must be nonempty");
  if (tolerances.empty()) throw std::invalid_argument("config: tolerances must be nonempty");
  if (preconditioners.empty())
    throw std::invalid_argument("config: preconditioners must be nonempty");
  for (const auto& g : grids)
    if (g.nx < 2 || g.ny < 2) throw std::invalid_argument("config: grid must be at least 2 x 2");
  for (double t : tolerances)
    if (!(t > 0.0)) throw std::invalid_argument("config: tolerances must be > 0");
  if (n_systems < 1) throw std::invalid_argument("config: n_systems must be >= 1");
  if (max_iter < m) throw std::invalid_argument("config: max_iter must be >= m");
  if (group_size < 2) throw std::invalid_argument("config: group_size must be >= 2");
  solver_config(tolerances.front()).validate(true);
  problem.grf.validate();
  problem.helmholtz_bc.validate();
}

SolverConfig BenchmarkConfig::solver_config(double tol) const {
  SolverConfig s;
  s.m = m;
  s.k = k;
  s.tol = tol;
  s.max_iter = max_iter;
  return s;
}

PrecondOptions BenchmarkConfig::precond_options(PrecondKind pk) const {
  return PrecondOptions{pk, sor_omega, bjacobi_block};
}

BenchmarkConfig BenchmarkConfig::from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  BenchmarkConfig c;
  for (const auto& [key, val] : j.items()) {
    if (key == "problem") {
      c.kind = parse_problem_kind(val.get<std::string>());
    } else if (key == "grids") {
      c.grids.clear();
      for (const auto& g : val) {
        if (g.is_number_integer()) {
          c.grids.push_back({g.get<Index>(), g.get<Index>()});
        } else if (g.is_array() && g.size() == 2) {
          c.grids.push_back({g[0].get<Index>(), g[1].get<Index>()});
        } else {
          throw std::invalid_argument("config: grids entries are N or [nx, ny]");
        }
      }
    } else if (key == "tolerances") {
      c.tolerances = val.get<std::vector<double>>();
    } else if (key == "preconditioners") {
      c.preconditioners.clear();
      for (const auto& p : val) c.preconditioners.push_back(parse_precond_kind(p.get<std::string>()));
    } else if (key == "n_systems") {
      c.n_systems = val.get<Index>();
    } else if (key == "m") {
      c.m = val.get<Index>();
    } else if (key == "k") {
      c.k = val.get<Index>();
    } else if (key == "max_iter") {
      c.max_iter = val.get<Index>();
    } else if (key == "seed") {
      c.seed = val.get<std::uint64_t>();
    } else if (key == "sort_mode") {
      c.sort_mode = parse_sort_mode(val.get<std::string>());
    } else if (key == "group_size") {
      c.group_size = val.get<Index>();
    } else if (key == "sor_omega") {
      c.sor_omega = val.get<double>();
    } else if (key == "bjacobi_block") {
      c.bjacobi_block = val.get<Index>();
    } else if (key == "grf") {
      c.problem.grf = grf_from_json(val, c.problem.grf);
    } else if (key == "chebyshev_degree") {
      c.problem.chebyshev_degree = val.get<Index>();
    } else if (key == "darcy_source") {
      c.problem.darcy_source = val.get<double>();
    } else if (key == "helmholtz_k0") {
      c.problem.helmholtz_k0 = val.get<double>();
    } else if (key == "helmholtz_bc") {
      c.problem.helmholtz_bc = grf_from_json(val, c.problem.helmholtz_bc);
    } else if (key == "ablation_eig_k") {
      c.ablation_eig_k = val.get<Index>();
    } else if (key == "shuffle_seed") {
      c.shuffle_seed = val.get<std::uint64_t>();
    } else if (key == "output_dir") {
      c.output_dir = val.get<std::string>();
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

json BenchmarkConfig::to_json() const {
  json grids_j = json::array();
  for (const auto& g : grids) grids_j.push_back({g.nx, g.ny});
  json pre = json::array();
  for (auto p : preconditioners) pre.push_back(std::string(to_string(p)));
  return {{"problem", to_string(kind)},
          {"grids", grids_j},
          {"tolerances", tolerances},
          {"preconditioners", pre},
          {"n_systems", n_systems},
          {"m", m},
          {"k", k},
          {"max_iter", max_iter},
          {"seed", seed},
          {"sort_mode", to_string(sort_mode)},
          {"group_size", group_size},
          {"sor_omega", sor_omega},
          {"bjacobi_block", bjacobi_block},
          {"grf", grf_to_json(problem.grf)},
          {"chebyshev_degree", problem.chebyshev_degree},
          {"darcy_source", problem.darcy_source},
          {"helmholtz_k0", problem.helmholtz_k0},
          {"helmholtz_bc", grf_to_json(problem.helmholtz_bc)},
          {"ablation_eig_k", ablation_eig_k},
          {"shuffle_seed", shuffle_seed},
          {"output_dir", output_dir}};
}

BenchmarkConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw io::IoError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  return BenchmarkConfig::from_json(j);
}

std::uint64_t matrix_hash(const CsrMatrix& a) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  const Index dims[2] = {a.rows(), a.cols()};
  mix(dims, sizeof dims);
  mix(a.row_ptr().data(), a.row_ptr().size_bytes());
  mix(a.col_idx().data(), a.col_idx().size_bytes());
  mix(a.values().data(), a.values().size_bytes());
  return h;
}

double effective_iterations(const SolveRecord& r, Index max_iter) {
  return r.converged ? static_cast<double>(r.iterations) : static_cast<double>(max_iter);
}

TableRow aggregate_cell(const std::vector<SolveRecord>& cell, Index max_iter) {
  TableRow row;
  if (cell.empty()) return row;
  row.grid = cell.front().grid;
  row.tol = cell.front().tol;
  row.precond = cell.front().precond;
  Index ng = 0, ns = 0;
  for (const auto& r : cell) {
    const bool gm = r.solver == "gmres";
    (gm ? row.gmres_time : row.skr_time) += r.wall_time;
    (gm ? row.gmres_iterations : row.skr_iterations) += effective_iterations(r, max_iter);
    if (!r.converged) ++(gm ? row.gmres_timeouts : row.skr_timeouts);
    ++(gm ? ng : ns);
  }
  if (ng > 0) {
    row.gmres_time /= static_cast<double>(ng);
    row.gmres_iterations /= static_cast<double>(ng);
  }
  if (ns > 0) {
    row.skr_time /= static_cast<double>(ns);
    row.skr_iterations /= static_cast<double>(ns);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.time_ratio = row.skr_time > 0.0 ? row.gmres_time / row.skr_time : nan;
  row.iteration_ratio = row.skr_iterations > 0.0 ? row.gmres_iterations / row.skr_iterations : nan;
  return row;
}

std::vector<Index> solve_order(const std::vector<LinearSystem>& batch, SortMode mode,
                               Index group_size, std::uint64_t shuffle_seed) {
  std::vector<ParameterMatrix> params;
  params.reserve(batch.size());
  for (const auto& s : batch) params.push_back(s.params);
  switch (mode) {
    case SortMode::Sorted:
      return greedy_sort(params);
    case SortMode::Grouped:
      return grouped_sort(params, group_size);
    case SortMode::Unsorted: {
      std::vector<Index> order(batch.size());
      std::iota(order.begin(), order.end(), Index{0});
      std::mt19937_64 rng(shuffle_seed);
      std::shuffle(order.begin(), order.end(), rng);
      return order;
    }
  }
  return {};
}

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
  cfg.validate();
  BenchmarkResult out;
  for (const Grid& grid : cfg.grids) {
    auto t0 = std::chrono::steady_clock::now();
    const auto batch = generate_batch(cfg.kind, cfg.n_systems, grid, cfg.seed, cfg.problem);
    const double assembly_time = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto order = solve_order(batch, cfg.sort_mode, cfg.group_size, cfg.shuffle_seed);
    const double sort_time = seconds_since(t0);
    out.solve_orders.push_back(order);
    const Index n = static_cast<Index>(batch.size());
    std::vector<std::uint64_t> hashes(n);
    for (Index i = 0; i < n; ++i) hashes[i] = matrix_hash(batch[i].a);

    for (PrecondKind pk : cfg.preconditioners) {
      const auto pre = build_all(batch, cfg.precond_options(pk));
      const double pre_total = std::accumulate(pre.time.begin(), pre.time.end(), 0.0);
      for (double tol : cfg.tolerances) {
        const SolverConfig scfg = cfg.solver_config(tol);
        std::vector<SolveRecord> cell(n);

        // GMRES: independent solves in the original order
#pragma omp parallel for schedule(dynamic)
        for (Index i = 0; i < n; ++i) {
          SolveRecord r = base_record(batch[i], tol, pk, "gmres", i, hashes[i]);
          r.precond_time = pre.time[i];
          if (!pre.m[i]) {
            r.failed = true;
            r.note = pre.error[i];
          } else {
            try {
              const auto rep = gmres_solve(batch[i].a, batch[i].b,
                                           Vector::Zero(batch[i].b.size()), *pre.m[i], scfg);
              fill_from_report(r, rep, cfg.max_iter);
            } catch (const std::exception& e) {
              r.failed = true;
              r.note = e.what();
            }
          }
          cell[i] = std::move(r);
        }

        // SKR: sequential in solve order with the recycle space carried over
        RecycleSpace recycle;
        for (Index pos = 0; pos < n; ++pos) {
          const Index id = order[pos];
          const auto& sys = batch[id];
          SolveRecord r = base_record(sys, tol, pk, "skr", pos, hashes[id]);
          r.precond_time = pre.time[id];
          if (!pre.m[id]) {
            r.failed = true;
            r.note = pre.error[id];
          } else {
            try {
              auto res = gcrodr_solve(sys.a, sys.b, Vector::Zero(sys.b.size()), *pre.m[id],
                                      scfg, recycle.empty() ? nullptr : &recycle);
              fill_from_report(r, res.report, cfg.max_iter);
              recycle = std::move(res.recycle);
              recycle.source_id = id;
            } catch (const std::exception& e) {
              r.failed = true;
              r.note = e.what();
            }
          }
          cell.push_back(std::move(r));
        }

        TableRow row = aggregate_cell(cell, cfg.max_iter);
        row.grid = grid;
        row.tol = tol;
        row.precond = pk;
        row.assembly_time = assembly_time;
        row.sort_time = sort_time;
        row.precond_time = pre_total;
        out.table.push_back(row);
        for (auto& r : cell) out.raw.push_back(std::move(r));
      }
    }
  }
  return out;
}

AblationResult run_ablation(const BenchmarkConfig& cfg) {
  cfg.validate();
  const Grid grid = cfg.grids.front();
  const double tol = cfg.tolerances.front();
  const PrecondKind pk = cfg.preconditioners.front();
  const Index eig_k = cfg.ablation_eig_k >= 0 ? cfg.ablation_eig_k : cfg.k;
  const SolverConfig scfg = cfg.solver_config(tol);

  const auto batch = generate_batch(cfg.kind, cfg.n_systems, grid, cfg.seed, cfg.problem);
  const Index n = static_cast<Index>(batch.size());
  const auto pre = build_all(batch, cfg.precond_options(pk));
  for (Index i = 0; i < n; ++i)
    if (!pre.m[i])
      throw std::runtime_error("ablation: preconditioner for system " + std::to_string(i) +
                               " failed: " + pre.error[i]);

  std::vector<SubspaceBasis> q(n);
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (Index i = 0; i < n; ++i) {
    try {
      q[i] = smallest_eig_subspace(batch[i].a, *pre.m[i], eig_k).basis;
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  AblationResult out;
  const std::pair<const char*, std::vector<Index>> orderings[] = {
      {"sorted", solve_order(batch, SortMode::Sorted, cfg.group_size, cfg.shuffle_seed)},
      {"unsorted", solve_order(batch, SortMode::Unsorted, cfg.group_size, cfg.shuffle_seed)}};
  for (const auto& [name, order] : orderings) {
    AblationSummary sum;
    sum.ordering = name;
    RecycleSpace recycle;
    Index n_delta = 0;
    for (Index pos = 0; pos < n; ++pos) {
      const Index id = order[pos];
      const auto& sys = batch[id];
      const auto& m = *pre.m[id];
      AblationRecord r;
      r.ordering = name;
      r.position = pos;
      r.system_id = id;
      r.delta = std::numeric_limits<double>::quiet_NaN();
      if (pos > 0) {
        SubspaceBasis c;
        if (!recycle.empty()) c.q = refresh_recycle(recycle.u, sys.a, m).c;
        else c.q.resize(sys.a.rows(), 0);
        r.delta = one_sided_distance(q[id], c);
        sum.mean_delta += r.delta;
        ++n_delta;
      }
      auto res = gcrodr_solve(sys.a, sys.b, Vector::Zero(sys.b.size()), m, scfg,
                              recycle.empty() ? nullptr : &recycle);
      r.iterations = res.report.iterations;
      r.wall_time = res.report.wall_time;
      r.converged = res.report.converged;
      r.true_relative_residual = res.report.true_relative_residual;
      sum.mean_iterations += r.converged ? static_cast<double>(r.iterations)
                                         : static_cast<double>(cfg.max_iter);
      sum.mean_time += r.wall_time;
      if (!r.converged) ++sum.timeouts;
      recycle = std::move(res.recycle);
      out.records.push_back(r);
    }
    sum.mean_delta = n_delta > 0 ? sum.mean_delta / static_cast<double>(n_delta)
                                 : std::numeric_limits<double>::quiet_NaN();
    sum.mean_iterations /= static_cast<double>(n);
    sum.mean_time /= static_cast<double>(n);
    out.summary.push_back(sum);
  }
  return out;
}

fs::path export_dataset(const std::vector<LinearSystem>& batch,
                        const std::vector<SolveReport>& reports,
                        const std::vector<Index>& order, const fs::path& dir,
                        const json& config) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io::IoError("cannot create dataset directory " + dir.string() + ": " + ec.message());
  if (!reports.empty() && reports.size() != batch.size())
    throw std::invalid_argument("export_dataset: one report per system required");

  json manifest;
  manifest["kind"] = batch.empty() ? "" : to_string(batch.front().kind);
  manifest["grid"] = batch.empty() ? json::array() : json::array({batch.front().grid.nx, batch.front().grid.ny});
  manifest["solve_order"] = order;
  manifest["config"] = config;
  char hash_buf[20];
  std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                static_cast<unsigned long long>([&] {
                  std::uint64_t h = 0xcbf29ce484222325ULL;
                  for (unsigned char c : config.dump()) {
                    h ^= c;
                    h *= 0x100000001b3ULL;
                  }
                  return h;
                }()));
  manifest["config_hash"] = hash_buf;
  json systems = json::array();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& sys = batch[i];
    char stem[32];
    std::snprintf(stem, sizeof stem, "sys_%04lld", static_cast<long long>(sys.id));
    const std::string s(stem);
    io::write_matrix_market(dir / (s + ".mtx"), sys.a);
    io::write_vector(dir / (s + "_rhs.txt"), sys.b);
    {
      auto out = open_out(dir / (s + "_params.csv"));
      const auto& p = sys.params.values;
      for (Index r = 0; r < p.rows(); ++r) {
        for (Index c = 0; c < p.cols(); ++c) out << (c ? "," : "") << fmt_double(p(r, c));
        out << '\n';
      }
    }
    json e = {{"id", sys.id},
              {"seed", sys.seed},
              {"matrix", s + ".mtx"},
              {"rhs", s + "_rhs.txt"},
              {"params", s + "_params.csv"},
              {"n", sys.a.rows()},
              {"nnz", sys.a.nnz()},
              {"matrix_hash", matrix_hash(sys.a)}};
    if (!reports.empty()) {
      const auto& rep = reports[i];
      io::write_vector(dir / (s + "_x.txt"), rep.x);
      e["solution"] = s + "_x.txt";
      e["iterations"] = rep.iterations;
      e["converged"] = rep.converged;
      e["true_relative_residual"] = rep.true_relative_residual;
      e["wall_time"] = rep.wall_time;
    }
    systems.push_back(std::move(e));
  }
  manifest["systems"] = std::move(systems);
  const fs::path mpath = dir / "manifest.json";
  auto out = open_out(mpath);
  out << manifest.dump(2) << '\n';
  if (!out) throw io::IoError("failed writing " + mpath.string());
  return mpath;
}

void write_table_csv(const fs::path& path, const std::vector<TableRow>& rows) {
  auto out = open_out(path);
  out << "grid,n,tol,precond,gmres_time,skr_time,gmres_iterations,skr_iterations,"
         "time_ratio,iteration_ratio,gmres_timeouts,skr_timeouts,assembly_time,"
         "sort_time,precond_time\n";
  for (const auto& r : rows) {
    out << grid_label(r.grid) << ',' << r.grid.size() << ',' << fmt_double(r.tol) << ','
        << to_string(r.precond) << ',' << fmt_double(r.gmres_time) << ','
        << fmt_double(r.skr_time) << ',' << fmt_double(r.gmres_iterations) << ','
        << fmt_double(r.skr_iterations) << ',' << fmt_double(r.time_ratio) << ','
        << fmt_double(r.iteration_ratio) << ',' << r.gmres_timeouts << ',' << r.skr_timeouts
        << ',' << fmt_double(r.assembly_time) << ',' << fmt_double(r.sort_time) << ','
        << fmt_double(r.precond_time) << '\n';
  }
}

void write_raw_csv(const fs::path& path, const std::vector<SolveRecord>& rows) {
  auto out = open_out(path);
  out << "grid,n,tol,precond,solver,system_id,solve_order,iterations,wall_time,converged,"
         "timed_out,failed,true_relative_residual,preconditioned_relative_residual,"
         "precond_time,matrix_hash,note\n";
  for (const auto& r : rows) {
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.matrix_hash));
    out << grid_label(r.grid) << ',' << r.grid.size() << ',' << fmt_double(r.tol) << ','
        << to_string(r.precond) << ',' << r.solver << ',' << r.system_id << ',' << r.position
        << ',' << r.iterations << ',' << fmt_double(r.wall_time) << ',' << r.converged << ','
        << r.timed_out << ',' << r.failed << ',' << fmt_double(r.true_relative_residual) << ','
        << fmt_double(r.preconditioned_relative_residual) << ','
        << fmt_double(r.precond_time) << ',' << hash << ',' << csv_escape(r.note) << '\n';
  }
}

void write_ablation_csv(const fs::path& path, const AblationResult& res) {
  auto out = open_out(path);
  out << "ordering,position,system_id,delta,iterations,wall_time,converged,"
         "true_relative_residual\n";
  for (const auto& r : res.records) {
    out << r.ordering << ',' << r.position << ',' << r.system_id << ','
        << (std::isnan(r.delta) ? std::string() : fmt_double(r.delta)) << ','
        << r.iterations << ',' << fmt_double(r.wall_time) << ',' << r.converged << ','
        << fmt_double(r.true_relative_residual) << '\n';
  }
  for (const auto& s : res.summary) {
    out << s.ordering << ",mean,," << fmt_double(s.mean_delta) << ','
        << fmt_double(s.mean_iterations) << ',' << fmt_double(s.mean_time) << ",,\n";
  }
}

}  // namespace skr
