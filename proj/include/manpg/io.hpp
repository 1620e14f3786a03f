#pragma once

#include <string>

#include "manpg/dense_matrix.hpp"

namespace manpg {

/// Loads a rectangular numeric CSV (comma separators, '.' decimal point,
/// optional single header row auto-detected by a non-numeric first line),
/// then applies normalize_columns(center). Rows are samples. Ragged rows and
/// non-numeric cells are reported with their 1-based line/column position.
DenseMatrix load_csv(const std::string& path, bool center);

/// Writes a matrix as CSV with enough digits to round-trip doubles.
void write_matrix_csv(const std::string& path, const DenseMatrix& m);

}  // namespace manpg
