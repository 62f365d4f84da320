#pragma once

#include <string>

#include "slra/matrix.hpp"

namespace slra {

/// MatrixMarket reader: coordinate or array, real/integer, general or
/// symmetric (symmetric storage is expanded). Throws std::runtime_error with
/// a line number on malformed input.
Matrix read_matrix_market(const std::string& path);

/// Writer: dense array format at full decimal precision (round-trip exact).
void write_matrix_market(const std::string& path, const Matrix& M);

}  // namespace slra
