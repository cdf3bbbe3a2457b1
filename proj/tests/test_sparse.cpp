#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "skr/io.hpp"
#include "skr/sparse.hpp"
#include "support.hpp"

using namespace skr;
using skr::test::Gen;

namespace {

CsrMatrix paper_matrix() {
  std::vector<Triplet> t;
  const DenseMatrix d = test::laplacian_4x4();
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j)
      if (d(i, j) != 0.0) t.push_back({i, j, d(i, j)});
  return assemble_csr(t, 4, 4);
}

}  // namespace

TEST_CASE("assemble_csr examples") {
  const std::vector<Triplet> one{{0, 0, 1.0}};
  const auto a = assemble_csr(one, 1, 1);
  CHECK(a.rows() == 1);
  CHECK(a.coeff(0, 0) == 1.0);

  const std::vector<Triplet> dup{{0, 1, 2.0}, {0, 1, 3.0}};
  const auto b = assemble_csr(dup, 1, 2);
  CHECK(b.nnz() == 1);
  CHECK(b.coeff(0, 0) == 0.0);
  CHECK(b.coeff(0, 1) == 5.0);

  const auto p = paper_matrix();
  CHECK(p.nnz() == 12);
  CHECK((p.to_dense() - test::laplacian_4x4()).norm() == 0.0);
}

TEST_CASE("assemble_csr keeps explicit cancellations and sorts rows") {
  const std::vector<Triplet> t{{1, 2, 1.0}, {1, 0, 4.0}, {1, 2, -1.0}, {0, 1, 7.0}};
  const auto a = assemble_csr(t, 2, 3);
  CHECK(a.find(1, 2) >= 0);
  CHECK(a.coeff(1, 2) == 0.0);
  CHECK(a.col_idx()[a.row_ptr()[1]] == 0);
}

TEST_CASE("assemble_csr rejects out-of-range triplets naming them") {
  const std::vector<Triplet> t{{0, 0, 1.0}, {2, 0, 3.5}};
  try {
    assemble_csr(t, 2, 2);
    FAIL("expected rejection");
  } catch (const std::out_of_range& e) {
    const std::string msg = e.what();
    CHECK(msg.find("(2, 0") != std::string::npos);
  }
}

TEST_CASE("CsrMatrix validates its invariants") {
  CHECK_THROWS(CsrMatrix(1, 2, {0, 2}, {1, 0}, {1.0, 2.0}));      // unsorted
  CHECK_THROWS(CsrMatrix(1, 2, {0, 1}, {5}, {1.0}));              // column range
  CHECK_THROWS(CsrMatrix(1, 1, {0, 1}, {0}, {std::nan("")}));     // NaN
  CHECK_THROWS(CsrMatrix(2, 2, {0, 1}, {0}, {1.0}));              // row_ptr length
  CHECK_NOTHROW(CsrMatrix(1, 2, {0, 2}, {0, 1}, {1.0, 2.0}));
}

TEST_CASE("spmv examples") {
  const auto i3 = identity_csr(3);
  const Vector x{{1.0, 2.0, 3.0}};
  CHECK((spmv(i3, x) - x).norm() == 0.0);

  const Vector ones = Vector::Ones(4);
  const Vector y = spmv(paper_matrix(), ones);
  for (Index i = 0; i < 4; ++i) CHECK(y[i] == -2.0);

  Gen g(1);
  const auto a = g.sparse(10, 3);
  const Vector v = g.vector(10);
  CHECK((spmv(a, v) - a.to_dense() * v).norm() <= 1e-14 * (1.0 + v.norm()));

  CHECK_THROWS_AS(spmv(a, Vector(Vector::Ones(9))), DimensionError);
}

TEST_CASE("level-1 examples") {
  CHECK(dot(Vector{{1.0, 0.0}}, Vector{{0.0, 1.0}}) == 0.0);
  CHECK(norm2(Vector{{3.0, 4.0}}) == 5.0);
  const Vector z = axpy(2.0, Vector{{1.0, 1.0}}, Vector{{0.0, 1.0}});
  CHECK(z[0] == 2.0);
  CHECK(z[1] == 3.0);
  CHECK_THROWS_AS(dot(Vector::Ones(2).eval(), Vector::Ones(3).eval()), DimensionError);
}

TEST_CASE("property: spmv is linear") {
  Gen g(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = g.integer(1, 120);
    const auto a = g.sparse(n, 4);
    const Vector x = g.vector(n), y = g.vector(n);
    const double al = g.uniform(), be = g.uniform();
    const Vector lhs = spmv(a, Vector(al * x + be * y));
    const Vector rhs = al * spmv(a, x) + be * spmv(a, y);
    CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("property: spmv equals a dense multiply for n <= 200") {
  Gen g(3);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = g.integer(1, 200);
    const Index m = g.integer(1, 200);
    std::vector<Triplet> t;
    for (Index q = 0; q < 3 * n; ++q) t.push_back({g.integer(0, n - 1), g.integer(0, m - 1), g.normal()});
    const auto a = assemble_csr(t, n, m);
    const Vector x = g.vector(m);
    // brute-force oracle straight from the triplets
    Vector ref = Vector::Zero(n);
    for (const auto& e : t) ref[e.row] += e.value * x[e.col];
    CHECK((spmv(a, x) - ref).norm() <= 1e-13 * (1.0 + ref.norm()));
  }
}

TEST_CASE("property: assemble_csr after to_triplets is the identity") {
  Gen g(4);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = g.integer(1, 80);
    const auto a = g.sparse(n, 5);
    const auto t = a.to_triplets();
    const auto b = assemble_csr(t, n, n);
    REQUIRE(b.nnz() == a.nnz());
    CHECK(std::equal(a.row_ptr().begin(), a.row_ptr().end(), b.row_ptr().begin()));
    CHECK(std::equal(a.col_idx().begin(), a.col_idx().end(), b.col_idx().begin()));
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  }
}

TEST_CASE("parallel kernels agree with the serial reference") {
  Gen g(5);
  const Index n = 40000;  // above the parallel threshold
  const auto a = g.sparse(n, 4);
  const Vector x = g.vector(n), y0 = g.vector(n);
  Vector y1(n), y2(n);
  spmv(a, as_span(x), as_span(y1));
  serial::spmv(a, as_span(x), as_span(y2));
  CHECK((y1 - y2).norm() == 0.0);
  CHECK(dot(as_span(x), as_span(y0)) ==
        doctest::Approx(serial::dot(as_span(x), as_span(y0))).epsilon(1e-13));
  CHECK(norm2(as_span(x)) == doctest::Approx(serial::norm2(as_span(x))).epsilon(1e-13));
  Vector z1 = y0, z2 = y0;
  axpy(0.3, as_span(x), as_span(z1));
  serial::axpy(0.3, as_span(x), as_span(z2));
  CHECK((z1 - z2).norm() == 0.0);
}

TEST_CASE("transpose, symmetry and dense round trip") {
  Gen g(6);
  const auto a = g.sparse(30, 4);
  CHECK((a.transpose().to_dense() - a.to_dense().transpose()).norm() == 0.0);
  CHECK(is_symmetric(paper_matrix()));
  CHECK_FALSE(is_symmetric(a));
  const auto b = from_dense(a.to_dense());
  CHECK((b.to_dense() - a.to_dense()).norm() == 0.0);
}

TEST_CASE("Matrix Market and vector files round-trip bit-exact") {
  Gen g(7);
  const auto a = g.sparse(25, 4);
  std::stringstream ss;
  io::write_matrix_market(ss, a);
  const auto b = io::read_matrix_market(ss);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin(), b.values().end()));
  CHECK(std::equal(a.col_idx().begin(), a.col_idx().end(), b.col_idx().begin(), b.col_idx().end()));

  Vector v = g.vector(17);
  v[3] = 1e-300;
  v[4] = -0.1;
  std::stringstream vs;
  io::write_vector(vs, v);
  const Vector w = io::read_vector(vs);
  CHECK((v.array() == w.array()).all());
}

TEST_CASE("Matrix Market symmetric storage expands the lower triangle") {
  std::stringstream ss(
      "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 4\n2 1 -1\n");
  const auto a = io::read_matrix_market(ss);
  CHECK(a.coeff(0, 1) == -1.0);
  CHECK(a.coeff(1, 0) == -1.0);
  CHECK(a.coeff(0, 0) == 4.0);
}

TEST_CASE("Matrix Market rejects malformed input") {
  std::stringstream bad_header("%%MatrixMarket matrix array real general\n1 1\n1\n");
  CHECK_THROWS_AS(io::read_matrix_market(bad_header), io::IoError);
  std::stringstream short_body("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1\n");
  CHECK_THROWS_AS(io::read_matrix_market(short_body), io::IoError);
  std::stringstream bad_index("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n");
  CHECK_THROWS(io::read_matrix_market(bad_index));
}
