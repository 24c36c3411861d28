#pragma once

#include <iosfwd>
#include <string>

#include "glme/dense_matrix.hpp"
#include "glme/sparse_matrix.hpp"

namespace glme {

/// Write a dense matrix as CSV: one row per line, comma separators, entries
/// formatted with full round-trip precision ("%.17g").
void write_csv(const std::string& path, const DenseMatrix& a);
void write_csv(std::ostream& out, const DenseMatrix& a);

/// Read a dense matrix from CSV.  Rejects ragged rows, unparsable or
/// non-finite entries, and empty files.
DenseMatrix read_csv(const std::string& path);
DenseMatrix read_csv(std::istream& in);

/// Write a sparse matrix in Matrix Market coordinate format
/// ("matrix coordinate real general", 1-based indices, "%.17g" values).
void write_matrix_market(const std::string& path, const SparseMatrix& a);
void write_matrix_market(std::ostream& out, const SparseMatrix& a);

/// Read a sparse matrix in Matrix Market coordinate format.  Accepts the
/// "real general" and "integer general" variants; anything else (complex,
/// pattern, symmetric, array) is rejected with an IoError.
SparseMatrix read_matrix_market(const std::string& path);
SparseMatrix read_matrix_market(std::istream& in);

/// Full round-trip formatting of one double ("%.17g" equivalent).
std::string format_full(double v);

}  // namespace glme
