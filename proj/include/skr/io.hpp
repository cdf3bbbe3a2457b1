#pragma once

/// \file skr/io.hpp
/// \brief Matrix Market (coordinate real general) and plain-text vector I/O.
///
/// Values are written with 17 significant digits so a write/read cycle
/// reproduces every double bit for bit.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "skr/sparse.hpp"

namespace skr::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

CsrMatrix read_matrix_market(std::istream& in);
CsrMatrix read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(std::ostream& out, const CsrMatrix& a);
void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& a);

/// One value per line; blank lines and lines starting with '%' or '#' skipped.
Vector read_vector(std::istream& in);
Vector read_vector(const std::filesystem::path& path);
void write_vector(std::ostream& out, const Vector& v);
void write_vector(const std::filesystem::path& path, const Vector& v);

}  // namespace skr::io
