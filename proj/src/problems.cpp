#include "skr/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace skr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_grid(Index nx, Index ny, const char* who) {
  if (nx < 2 || ny < 2)
    throw std::invalid_argument(std::string(who) + ": grid must be at least 2 x 2");
}

struct Eig1d {
  Vector values;
  DenseMatrix vectors;
};

Eig1d se_kernel_eig(const std::vector<double>& x, double length_scale) {
  const Index n = static_cast<Index>(x.size());
  DenseMatrix k(n, n);
  const double s = 2.0 * length_scale * length_scale;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) k(i, j) = std::exp(-(x[i] - x[j]) * (x[i] - x[j]) / s);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(k);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sample_grf: covariance eigendecomposition failed");
  Eig1d out{es.eigenvalues().cwiseMax(0.0), es.eigenvectors()};
  for (Index c = 0; c < n; ++c) {
    Index imax = 0;
    out.vectors.col(c).cwiseAbs().maxCoeff(&imax);
    if (out.vectors(imax, c) < 0) out.vectors.col(c) *= -1.0;
  }
  return out;
}

Vector standard_normals(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Vector xi(n);
  for (Index i = 0; i < n; ++i) xi[i] = nd(rng);
  return xi;
}

/// Five-point flux assembly shared by the scalar elliptic problems.
struct StencilSpec {
  Index nx, ny;
  Domain dom;
  /// Coefficient on the face between node (i, j) and its neighbour in
  /// direction d (0 = west, 1 = east, 2 = south, 3 = north); `boundary` is
  /// true when the neighbour lies on the domain boundary.
  std::function<double(Index, Index, int, bool)> face;
  std::function<double(Index, Index)> extra_diag;    // added after scaling
  std::function<double(double, double)> dirichlet;   // boundary value
  std::function<double(double, double)> source;      // right-hand side density
};

void assemble_five_point(const StencilSpec& s, CsrMatrix& a, Vector& b) {
  const double hx = (s.dom.x1 - s.dom.x0) / static_cast<double>(s.nx + 1);
  const double hy = (s.dom.y1 - s.dom.y0) / static_cast<double>(s.ny + 1);
  const Index n = s.nx * s.ny;
  std::vector<Triplet> t;
  t.reserve(5 * n);
  b = Vector::Zero(n);
  const double wx = hy / hx;
  const double wy = hx / hy;
  for (Index j = 0; j < s.ny; ++j) {
    for (Index i = 0; i < s.nx; ++i) {
      const Index row = j * s.nx + i;
      const double x = s.dom.x0 + (i + 1) * hx;
      const double y = s.dom.y0 + (j + 1) * hy;
      double diag = 0.0;
      double rhs = s.source ? s.source(x, y) * hx * hy : 0.0;
      struct Nb { Index di, dj; double w; int dir; };
      const Nb nbs[4] = {{-1, 0, wx, 0}, {1, 0, wx, 1}, {0, -1, wy, 2}, {0, 1, wy, 3}};
      for (const Nb& nb : nbs) {
        const Index ii = i + nb.di;
        const Index jj = j + nb.dj;
        const bool boundary = ii < 0 || ii >= s.nx || jj < 0 || jj >= s.ny;
        const double c = nb.w * (s.face ? s.face(i, j, nb.dir, boundary) : 1.0);
        diag -= c;
        if (boundary) {
          if (s.dirichlet) rhs -= c * s.dirichlet(s.dom.x0 + (ii + 1) * hx,
                                                 s.dom.y0 + (jj + 1) * hy);
        } else {
          t.push_back({row, jj * s.nx + ii, c});
        }
      }
      if (s.extra_diag) diag += s.extra_diag(i, j) * hx * hy;
      t.push_back({row, row, diag});
      b[row] = rhs;
    }
  }
  a = assemble_csr(t, n, n);
}

}  // namespace

std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::Poisson: return "poisson";
    case ProblemKind::Darcy: return "darcy";
    case ProblemKind::Helmholtz: return "helmholtz";
    case ProblemKind::Thermal: return "thermal";
  }
  return "?";
}

ProblemKind parse_problem_kind(std::string_view s) {
  std::string l(s);
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "poisson") return ProblemKind::Poisson;
  if (l == "darcy") return ProblemKind::Darcy;
  if (l == "helmholtz") return ProblemKind::Helmholtz;
  if (l == "thermal") return ProblemKind::Thermal;
  throw std::invalid_argument("unknown problem kind '" + l + "'");
}

void GrfSpec::validate() const {
  if (!(length_scale > 0.0)) throw std::invalid_argument("grf: length_scale must be > 0");
  if (!(variance > 0.0)) throw std::invalid_argument("grf: variance must be > 0");
  if (kl_rank < 1) throw std::invalid_argument("grf: kl_rank must be >= 1");
}

std::vector<double> interior_nodes(Index n) {
  std::vector<double> x(n);
  for (Index i = 0; i < n; ++i) x[i] = static_cast<double>(i + 1) / static_cast<double>(n + 1);
  return x;
}

GrfSample sample_grf_1d(const std::vector<double>& x, const GrfSpec& spec) {
  spec.validate();
  const Index n = static_cast<Index>(x.size());
  if (n < 1) throw std::invalid_argument("sample_grf_1d: empty point set");
  const Eig1d e = se_kernel_eig(x, spec.length_scale);
  const Index r = std::min(spec.kl_rank, n);
  GrfSample out;
  out.xi = standard_normals(spec.kl_rank, spec.seed);
  out.field = Vector::Zero(n);
  // eigenvalues ascend; the largest are at the end
  for (Index q = 0; q < r; ++q) {
    const Index c = n - 1 - q;
    out.field += std::sqrt(spec.variance * e.values[c]) * out.xi[q] * e.vectors.col(c);
  }
  return out;
}

GrfSample sample_grf(const Grid& grid, const GrfSpec& spec) {
  spec.validate();
  check_grid(grid.nx, grid.ny, "sample_grf");
  const Eig1d ex = se_kernel_eig(interior_nodes(grid.nx), spec.length_scale);
  const Eig1d ey = ex.values.size() == grid.ny && grid.nx == grid.ny
                       ? ex
                       : se_kernel_eig(interior_nodes(grid.ny), spec.length_scale);
  struct Mode { double lambda; Index a, b; };
  std::vector<Mode> modes;
  modes.reserve(grid.nx * grid.ny);
  for (Index a = 0; a < grid.nx; ++a)
    for (Index b = 0; b < grid.ny; ++b)
      modes.push_back({ex.values[a] * ey.values[b], a, b});
  const Index r = std::min<Index>(spec.kl_rank, static_cast<Index>(modes.size()));
  std::partial_sort(modes.begin(), modes.begin() + r, modes.end(),
                    [](const Mode& p, const Mode& q) {
                      if (p.lambda != q.lambda) return p.lambda > q.lambda;
                      if (p.a != q.a) return p.a > q.a;
                      return p.b > q.b;
                    });
  GrfSample out;
  out.xi = standard_normals(spec.kl_rank, spec.seed);
  out.field = Vector::Zero(grid.size());
  for (Index q = 0; q < r; ++q) {
    const Mode& md = modes[q];
    const double amp = std::sqrt(spec.variance * md.lambda) * out.xi[q];
    if (amp == 0.0) continue;
    for (Index j = 0; j < grid.ny; ++j) {
      const double yv = amp * ey.vectors(j, md.b);
      for (Index i = 0; i < grid.nx; ++i)
        out.field[j * grid.nx + i] += yv * ex.vectors(i, md.a);
    }
  }
  return out;
}

double ChebyshevSeries::operator()(double t) const {
  // Clenshaw recurrence
  double b1 = 0.0, b2 = 0.0;
  for (Index j = coeffs.size() - 1; j >= 1; --j) {
    const double b0 = coeffs[j] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs.size() == 0 ? 0.0 : coeffs[0] + t * b1 - b2;
}

ChebyshevSeries sample_chebyshev(Index degree, std::uint64_t seed) {
  if (degree < 0) throw std::invalid_argument("sample_chebyshev: degree must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  ChebyshevSeries s;
  s.coeffs.resize(degree + 1);
  for (Index j = 0; j <= degree; ++j) s.coeffs[j] = ud(rng);
  return s;
}

LinearSystem assemble_poisson(Index nx, Index ny, const ScalarField& f,
                              const ScalarField& g, const Domain& dom) {
  check_grid(nx, ny, "assemble_poisson");
  StencilSpec s{nx, ny, dom, nullptr, nullptr, g, f};
  LinearSystem sys;
  assemble_five_point(s, sys.a, sys.b);
  sys.grid = {nx, ny};
  sys.kind = ProblemKind::Poisson;
  return sys;
}

LinearSystem random_poisson(Index nx, Index ny, Index degree, std::uint64_t seed) {
  std::vector<ChebyshevSeries> s;
  for (int e = 0; e < 5; ++e) s.push_back(sample_chebyshev(degree, splitmix64(seed + e)));
  auto g = [&](double x, double y) {
    if (y <= 0.0) return s[0](2 * x - 1);
    if (y >= 1.0) return s[1](2 * x - 1);
    if (x <= 0.0) return s[2](2 * y - 1);
    return s[3](2 * y - 1);
  };
  auto f = [&](double x, double y) { return s[4](2 * x - 1) * s[4](2 * y - 1); };
  LinearSystem sys = assemble_poisson(nx, ny, f, g);
  sys.params.values.resize(5, degree + 1);
  for (int e = 0; e < 5; ++e) sys.params.values.row(e) = s[e].coeffs.transpose();
  sys.seed = seed;
  return sys;
}

CsrMatrix darcy_matrix(Index nx, Index ny, const Vector& k) {
  check_grid(nx, ny, "darcy_matrix");
  if (k.size() != nx * ny) throw DimensionError("darcy_matrix: permeability length");
  StencilSpec s{nx, ny, {}, nullptr, nullptr, nullptr, nullptr};
  s.face = [&](Index i, Index j, int dir, bool boundary) {
    const double ki = k[j * nx + i];
    if (boundary) return ki;
    const Index ii = i + (dir == 0 ? -1 : dir == 1 ? 1 : 0);
    const Index jj = j + (dir == 2 ? -1 : dir == 3 ? 1 : 0);
    const double kn = k[jj * nx + ii];
    return 2.0 * ki * kn / (ki + kn);
  };
  CsrMatrix a;
  Vector b;
  assemble_five_point(s, a, b);
  return a;
}

LinearSystem assemble_darcy(Index nx, Index ny, const GrfSpec& grf, double f_const) {
  check_grid(nx, ny, "assemble_darcy");
  const GrfSample g = sample_grf({nx, ny}, grf);
  LinearSystem sys;
  sys.a = darcy_matrix(nx, ny, g.field.array().exp().matrix());
  const double hx = 1.0 / static_cast<double>(nx + 1);
  const double hy = 1.0 / static_cast<double>(ny + 1);
  // div(K grad h) = -f, scaled by dx dy
  sys.b = Vector::Constant(nx * ny, -f_const * hx * hy);
  sys.params.values = g.xi;
  sys.grid = {nx, ny};
  sys.kind = ProblemKind::Darcy;
  sys.seed = grf.seed;
  return sys;
}

CsrMatrix helmholtz_matrix(Index nx, Index ny, const Vector& k) {
  check_grid(nx, ny, "helmholtz_matrix");
  if (k.size() != nx * ny) throw DimensionError("helmholtz_matrix: wavenumber length");
  StencilSpec s{nx, ny, {}, nullptr, nullptr, nullptr, nullptr};
  s.extra_diag = [&](Index i, Index j) {
    const double kv = k[j * nx + i];
    return kv * kv;
  };
  CsrMatrix a;
  Vector b;
  assemble_five_point(s, a, b);
  return a;
}

LinearSystem assemble_helmholtz(Index nx, Index ny, const GrfSpec& grf, double k0,
                                std::uint64_t bc_seed, const GrfSpec& bc_grf) {
  check_grid(nx, ny, "assemble_helmholtz");
  if (!(k0 >= 0.0)) throw std::invalid_argument("assemble_helmholtz: k0 must be >= 0");
  const GrfSample kf = sample_grf({nx, ny}, grf);
  const Vector k = (kf.field.array() + k0).matrix();

  const auto xs = interior_nodes(nx);
  const auto ys = interior_nodes(ny);
  std::vector<GrfSample> edges;
  for (int e = 0; e < 4; ++e) {
    GrfSpec spec = bc_grf;
    spec.seed = splitmix64(bc_seed + e);
    edges.push_back(sample_grf_1d(e < 2 ? xs : ys, spec));
  }
  auto locate = [](const std::vector<double>& nodes, double v) {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), v - 1e-12);
    return static_cast<Index>(it - nodes.begin());
  };
  StencilSpec s{nx, ny, {}, nullptr, nullptr, nullptr, nullptr};
  s.extra_diag = [&](Index i, Index j) {
    const double kv = k[j * nx + i];
    return kv * kv;
  };
  s.dirichlet = [&](double x, double y) {
    if (y <= 1e-14) return edges[0].field[locate(xs, x)];
    if (y >= 1.0 - 1e-14) return edges[1].field[locate(xs, x)];
    if (x <= 1e-14) return edges[2].field[locate(ys, y)];
    return edges[3].field[locate(ys, y)];
  };
  LinearSystem sys;
  assemble_five_point(s, sys.a, sys.b);

  Vector p(kf.xi.size() + 4 * bc_grf.kl_rank);
  p.head(kf.xi.size()) = kf.xi;
  for (int e = 0; e < 4; ++e) p.segment(kf.xi.size() + e * bc_grf.kl_rank, bc_grf.kl_rank) = edges[e].xi;
  sys.params.values = p;
  sys.grid = {nx, ny};
  sys.kind = ProblemKind::Helmholtz;
  sys.seed = grf.seed;
  return sys;
}

LinearSystem assemble_thermal(Index nx, Index ny, double t_left, double t_right) {
  check_grid(nx, ny, "assemble_thermal");
  if (ny < 3) throw std::invalid_argument("assemble_thermal: ny must be >= 3");
  const double hx = 1.0 / static_cast<double>(nx + 1);
  const double hy = 1.0 / static_cast<double>(ny - 1);
  const double wx = hy / hx;
  const double wy = hx / hy;
  const Index n = nx * ny;
  std::vector<Triplet> t;
  t.reserve(5 * n);
  Vector b = Vector::Zero(n);
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      const Index row = j * nx + i;
      if (j == 0 || j == ny - 1) {
        const Index step = j == 0 ? nx : -nx;
        t.push_back({row, row, -3.0});
        t.push_back({row, row + step, 4.0});
        t.push_back({row, row + 2 * step, -1.0});
        continue;
      }
      t.push_back({row, row, -2.0 * (wx + wy)});
      t.push_back({row, row - nx, wy});
      t.push_back({row, row + nx, wy});
      if (i > 0) t.push_back({row, row - 1, wx}); else b[row] -= wx * t_left;
      if (i < nx - 1) t.push_back({row, row + 1, wx}); else b[row] -= wx * t_right;
    }
  }
  LinearSystem sys;
  sys.a = assemble_csr(t, n, n);
  sys.b = std::move(b);
  sys.params.values = Vector{{t_left, t_right}};
  sys.grid = {nx, ny};
  sys.kind = ProblemKind::Thermal;
  return sys;
}

LinearSystem random_thermal(Index nx, Index ny, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> left(-100.0, 0.0);
  std::uniform_real_distribution<double> right(0.0, 100.0);
  const double tl = left(rng);
  const double tr = right(rng);
  LinearSystem sys = assemble_thermal(nx, ny, tl, tr);
  sys.seed = seed;
  return sys;
}

std::uint64_t system_seed(std::uint64_t base_seed, Index index) {
  return splitmix64(splitmix64(base_seed) ^ static_cast<std::uint64_t>(index));
}

LinearSystem generate_system(ProblemKind kind, const Grid& grid,
                             std::uint64_t base_seed, Index index,
                             const ProblemSpec& spec) {
  const std::uint64_t seed = system_seed(base_seed, index);
  LinearSystem sys;
  switch (kind) {
    case ProblemKind::Poisson:
      sys = random_poisson(grid.nx, grid.ny, spec.chebyshev_degree, seed);
      break;
    case ProblemKind::Darcy: {
      GrfSpec g = spec.grf;
      g.seed = seed;
      sys = assemble_darcy(grid.nx, grid.ny, g, spec.darcy_source);
      break;
    }
    case ProblemKind::Helmholtz: {
      GrfSpec g = spec.grf;
      g.seed = seed;
      sys = assemble_helmholtz(grid.nx, grid.ny, g, spec.helmholtz_k0,
                               splitmix64(seed ^ 0x5bd1e995ULL), spec.helmholtz_bc);
      break;
    }
    case ProblemKind::Thermal:
      sys = random_thermal(grid.nx, grid.ny, seed);
      break;
  }
  sys.id = index;
  sys.seed = seed;
  sys.params.problem_id = index;
  return sys;
}

std::vector<LinearSystem> generate_batch(ProblemKind kind, Index n_systems,
                                         const Grid& grid, std::uint64_t base_seed,
                                         const ProblemSpec& spec) {
  if (n_systems < 1) throw std::invalid_argument("generate_batch: n_systems must be >= 1");
  std::vector<LinearSystem> out(n_systems);
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (Index i = 0; i < n_systems; ++i) {
    try {
      out[i] = generate_system(kind, grid, base_seed, i, spec);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace skr
