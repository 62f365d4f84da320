#include "slra/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace slra {

IndexSet::IndexSet(std::vector<Index> idx, Index bound) : idx_(std::move(idx)), bound_(bound) {
  std::vector<bool> seen(static_cast<size_t>(bound), false);
  for (Index i : idx_) {
    if (i < 0 || i >= bound) throw std::invalid_argument("IndexSet: index out of bound");
    if (seen[static_cast<size_t>(i)]) throw std::invalid_argument("IndexSet: duplicate index");
    seen[static_cast<size_t>(i)] = true;
  }
}

IndexSet IndexSet::iota(Index count, Index bound) {
  std::vector<Index> v(static_cast<size_t>(count));
  for (Index i = 0; i < count; ++i) v[static_cast<size_t>(i)] = i;
  return IndexSet(std::move(v), bound);
}

bool IndexSet::contains(Index i) const {
  for (Index j : idx_)
    if (j == i) return true;
  return false;
}

void check_finite(const Matrix& A, const char* what) {
  if (!A.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

Matrix select_rows(const Matrix& A, const IndexSet& I) {
  Matrix out(I.size(), A.cols());
  for (Index t = 0; t < I.size(); ++t) out.row(t) = A.row(I[t]);
  return out;
}

Matrix select_cols(const Matrix& A, const IndexSet& J) {
  Matrix out(A.rows(), J.size());
  for (Index t = 0; t < J.size(); ++t) out.col(t) = A.col(J[t]);
  return out;
}

Matrix select_block(const Matrix& A, const IndexSet& I, const IndexSet& J) {
  Matrix out(I.size(), J.size());
  for (Index s = 0; s < I.size(); ++s)
    for (Index t = 0; t < J.size(); ++t) out(s, t) = A(I[s], J[t]);
  return out;
}

Svd Svd::head(Index r) const {
  Svd out;
  out.S = S.leftCols(r);
  out.sigma = sigma.head(r);
  out.T = T.leftCols(r);
  return out;
}

Matrix matmul(const Matrix& A, const Matrix& B) {
  if (A.cols() != B.rows()) throw std::invalid_argument("matmul: dimension mismatch");
  return A * B;
}

std::pair<Matrix, Matrix> thin_qr(const Matrix& A) {
  if (A.rows() < A.cols()) throw std::invalid_argument("thin_qr: rows < cols");
  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix Q = qr.householderQ() * Matrix::Identity(A.rows(), A.cols());
  Matrix R = qr.matrixQR().topRows(A.cols()).triangularView<Eigen::Upper>();
  for (Index i = 0; i < R.rows(); ++i) {
    if (R(i, i) < 0) {
      R.row(i) = -R.row(i);
      Q.col(i) = -Q.col(i);
    }
  }
  return {std::move(Q), std::move(R)};
}

Svd svd(const Matrix& A) {
  Eigen::BDCSVD<Matrix> dec(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Svd out;
  out.S = dec.matrixU();
  out.sigma = dec.singularValues();
  out.T = dec.matrixV();
  // Deterministic signs: largest-magnitude entry of each left singular
  // vector is nonnegative (ties broken by the lowest row index Eigen visits).
  for (Index j = 0; j < out.S.cols(); ++j) {
    Index imax = 0;
    out.S.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.S(imax, j) < 0) {
      out.S.col(j) = -out.S.col(j);
      out.T.col(j) = -out.T.col(j);
    }
  }
  return out;
}

LowRankFactors truncate_rank(const Matrix& A, Index rho) {
  if (rho < 1 || rho > std::min(A.rows(), A.cols()))
    throw std::invalid_argument("truncate_rank: rho out of range");
  const Svd f = svd(A);
  LowRankFactors out;
  out.U = f.S.leftCols(rho) * f.sigma.head(rho).asDiagonal();
  out.V = f.T.leftCols(rho).transpose();
  out.target_rank = rho;
  return out;
}

Matrix pseudo_inverse(const Matrix& A, double rank_tol) {
  const Svd f = svd(A);
  if (f.sigma.size() == 0 || f.sigma(0) == 0.0)
    return Matrix::Zero(A.cols(), A.rows());
  const double cut = rank_tol * f.sigma(0);
  Index rho = 0;
  while (rho < f.sigma.size() && f.sigma(rho) > cut) ++rho;
  if (rho == 0) return Matrix::Zero(A.cols(), A.rows());
  Vector inv = f.sigma.head(rho).cwiseInverse();
  return f.T.leftCols(rho) * inv.asDiagonal() * f.S.leftCols(rho).transpose();
}

Index numerical_rank(const Matrix& A, double tol, RankMode mode) {
  if (tol <= 0) throw std::invalid_argument("numerical_rank: tol must be positive");
  const Svd f = svd(A);
  if (f.sigma.size() == 0) return 0;
  const double cut = (mode == RankMode::Absolute) ? tol : tol * f.sigma(0);
  Index count = 0;
  for (Index i = 0; i < f.sigma.size(); ++i)
    if (f.sigma(i) > cut) ++count;
  return count;
}

double spectral_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  return Eigen::BDCSVD<Matrix>(A).singularValues()(0);
}

double frobenius_norm(const Matrix& A) { return A.norm(); }

double chebyshev_norm(const Matrix& A) {
  return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

double matrix_norm(const Matrix& A, NormKind kind) {
  switch (kind) {
    case NormKind::Spectral: return spectral_norm(A);
    case NormKind::Frobenius: return frobenius_norm(A);
    default: return chebyshev_norm(A);
  }
}

double condition_number(const Matrix& A, double rank_tol) {
  const Svd f = svd(A);
  if (f.sigma.size() == 0 || f.sigma(0) == 0.0)
    throw std::invalid_argument("condition_number: zero matrix");
  const double cut = rank_tol * f.sigma(0);
  Index rho = 0;
  while (rho < f.sigma.size() && f.sigma(rho) > cut) ++rho;
  return f.sigma(0) / f.sigma(rho - 1);
}

}  // namespace slra
