#include "slra/mmio.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace slra {

namespace {

[[noreturn]] void fail(const std::string& path, long line, const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

Matrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  long lineno = 0;

  if (!std::getline(in, line)) fail(path, 1, "empty file");
  ++lineno;
  std::istringstream hdr(line);
  std::string banner, object, format, field, symmetry;
  hdr >> banner >> object >> format >> field >> symmetry;
  std::transform(format.begin(), format.end(), format.begin(), ::tolower);
  std::transform(field.begin(), field.end(), field.begin(), ::tolower);
  std::transform(symmetry.begin(), symmetry.end(), symmetry.begin(), ::tolower);
  if (banner != "%%MatrixMarket" || object != "matrix")
    fail(path, lineno, "not a MatrixMarket matrix file");
  if (format != "coordinate" && format != "array")
    fail(path, lineno, "unsupported format: " + format);
  if (field != "real" && field != "integer")
    fail(path, lineno, "unsupported field: " + field);
  if (symmetry != "general" && symmetry != "symmetric")
    fail(path, lineno, "unsupported symmetry: " + symmetry);

  // skip comments
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream sz(line);
  Index m = 0, n = 0;
  long nnz = 0;
  if (format == "coordinate") {
    if (!(sz >> m >> n >> nnz)) fail(path, lineno, "bad size line");
  } else {
    if (!(sz >> m >> n)) fail(path, lineno, "bad size line");
  }
  if (m <= 0 || n <= 0) fail(path, lineno, "non-positive dimensions");

  Matrix M = Matrix::Zero(m, n);
  if (format == "coordinate") {
    for (long t = 0; t < nnz; ++t) {
      if (!std::getline(in, line)) fail(path, lineno + 1, "unexpected end of file");
      ++lineno;
      std::istringstream es(line);
      Index i, j;
      double v;
      if (!(es >> i >> j >> v)) fail(path, lineno, "bad entry line");
      if (i < 1 || i > m || j < 1 || j > n) fail(path, lineno, "entry index out of range");
      M(i - 1, j - 1) = v;
      if (symmetry == "symmetric") M(j - 1, i - 1) = v;
    }
  } else {
    // column-major dense listing; symmetric stores the lower triangle
    std::istringstream es;
    auto next_value = [&](double& v) {
      while (!(es >> v)) {
        if (!std::getline(in, line)) fail(path, lineno + 1, "unexpected end of file");
        ++lineno;
        if (!line.empty() && line[0] == '%') continue;
        es.clear();
        es.str(line);
      }
    };
    es.str(line);
    es.seekg(0, std::ios::end);  // size line already consumed
    for (Index j = 0; j < n; ++j) {
      const Index i0 = (symmetry == "symmetric") ? j : 0;
      for (Index i = i0; i < m; ++i) {
        double v;
        next_value(v);
        M(i, j) = v;
        if (symmetry == "symmetric") M(j, i) = v;
      }
    }
  }
  check_finite(M, "read_matrix_market");
  return M;
}

void write_matrix_market(const std::string& path, const Matrix& M) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "%%MatrixMarket matrix array real general\n";
  out << M.rows() << " " << M.cols() << "\n";
  out.precision(17);
  for (Index j = 0; j < M.cols(); ++j)
    for (Index i = 0; i < M.rows(); ++i) out << M(i, j) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace slra
