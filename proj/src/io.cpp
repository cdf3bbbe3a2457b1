#include "skr/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace skr::io {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

}  // namespace

CsrMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("matrix market: empty input");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lower(object) != "matrix")
    throw IoError("matrix market: missing banner");
  if (lower(format) != "coordinate")
    throw IoError("matrix market: only coordinate format supported");
  field = lower(field);
  if (field != "real" && field != "integer" && field != "double")
    throw IoError("matrix market: unsupported field '" + field + "'");
  symmetry = lower(symmetry);
  if (symmetry != "general" && symmetry != "symmetric")
    throw IoError("matrix market: unsupported symmetry '" + symmetry + "'");

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  Index rows = 0, cols = 0, entries = 0;
  {
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> entries))
      throw IoError("matrix market: bad size line");
  }
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(entries) * (symmetry == "general" ? 1 : 2));
  for (Index k = 0; k < entries; ++k) {
    Index i, j;
    double v;
    if (!(in >> i >> j >> v))
      throw IoError("matrix market: truncated entry list at entry " +
                    std::to_string(k));
    t.push_back({i - 1, j - 1, v});
    if (symmetry == "symmetric" && i != j) t.push_back({j - 1, i - 1, v});
  }
  return assemble_csr(t, rows, cols);
}

CsrMatrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_matrix_market(in);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_matrix_market(std::ostream& out, const CsrMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  for (Index i = 0; i < a.rows(); ++i)
    for (Index p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
      out << i + 1 << ' ' << a.col_idx()[p] + 1 << ' '
          << format_double(a.values()[p]) << '\n';
}

void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& a) {
  auto out = open_out(path);
  write_matrix_market(out, a);
  if (!out) throw IoError("write failed: " + path.string());
}

Vector read_vector(std::istream& in) {
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%' || line[first] == '#')
      continue;
    char* end = nullptr;
    double v = std::strtod(line.c_str() + first, &end);
    if (end == line.c_str() + first)
      throw IoError("vector: unparsable line '" + line + "'");
    vals.push_back(v);
  }
  return Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size()));
}

Vector read_vector(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_vector(in);
}

void write_vector(std::ostream& out, const Vector& v) {
  for (Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
}

void write_vector(const std::filesystem::path& path, const Vector& v) {
  auto out = open_out(path);
  write_vector(out, v);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace skr::io
