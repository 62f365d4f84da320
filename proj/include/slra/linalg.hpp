#pragma once

#include <utility>

#include "slra/matrix.hpp"

namespace slra {

/// Compact SVD: M = S * diag(sigma) * T^T with S (m x rho), T (n x rho)
/// orthonormal-column factors and sigma nonincreasing.
struct Svd {
  Matrix S;
  Vector sigma;
  Matrix T;

  Matrix reconstruct() const { return S * sigma.asDiagonal() * T.transpose(); }
  Svd head(Index r) const;  // leading-r slice
};

/// Two-factor low-rank representation M ~ U * V with a declared target rank.
struct LowRankFactors {
  Matrix U;  // m x l
  Matrix V;  // l x n
  Index target_rank = 0;

  Index l() const { return U.cols(); }
  Matrix product() const { return U * V; }
};

enum class RankMode { Absolute, Relative };
enum class NormKind { Spectral, Frobenius, Chebyshev };

Matrix matmul(const Matrix& A, const Matrix& B);

/// Thin QR with the sign convention R(i,i) >= 0.
std::pair<Matrix, Matrix> thin_qr(const Matrix& A);

/// Compact SVD with a deterministic sign convention: the largest-magnitude
/// entry of each left singular vector is nonnegative.
Svd svd(const Matrix& A);

/// Optimal rank-rho factors (S_rho * diag(sigma), T_rho^T).
LowRankFactors truncate_rank(const Matrix& A, Index rho);

Matrix pseudo_inverse(const Matrix& A, double rank_tol = 1e-10);

Index numerical_rank(const Matrix& A, double tol, RankMode mode = RankMode::Absolute);

double spectral_norm(const Matrix& A);
double frobenius_norm(const Matrix& A);
double chebyshev_norm(const Matrix& A);
double matrix_norm(const Matrix& A, NormKind kind);
double condition_number(const Matrix& A, double rank_tol = 1e-10);

}  // namespace slra
