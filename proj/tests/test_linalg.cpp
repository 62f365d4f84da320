#include "doctest.h"
#include "slra/linalg.hpp"
#include "slra/rng.hpp"

#include <cmath>

using namespace slra;

namespace {

// Independent oracle: naive triple loop, no library multiply.
Matrix matmul_oracle(const Matrix& A, const Matrix& B) {
  Matrix C = Matrix::Zero(A.rows(), B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < B.cols(); ++j)
      for (Index k = 0; k < A.cols(); ++k) C(i, j) += A(i, k) * B(k, j);
  return C;
}

Matrix random_orthogonal(Index n, Rng& rng) {
  return thin_qr(rng.gaussian_matrix(n, n)).first;
}

}  // namespace

TEST_CASE("matmul basics and oracle") {
  Rng rng(11);
  Matrix B = rng.gaussian_matrix(3, 5);
  CHECK((matmul(Matrix::Identity(3, 3), B) - B).norm() == 0.0);

  Matrix A(2, 2);
  A << 1, 2, 3, 4;
  Matrix x(2, 1);
  x << 1, 1;
  Matrix y = matmul(A, x);
  CHECK(y(0, 0) == doctest::Approx(3));
  CHECK(y(1, 0) == doctest::Approx(7));

  Matrix P = rng.gaussian_matrix(5, 4), Q = rng.gaussian_matrix(4, 3);
  CHECK((matmul(P, Q) - matmul_oracle(P, Q)).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS(matmul(P, P));
}

TEST_CASE("thin_qr") {
  Matrix A(2, 1);
  A << 3, 4;
  auto [Q, R] = thin_qr(A);
  CHECK(Q(0, 0) == doctest::Approx(0.6));
  CHECK(Q(1, 0) == doctest::Approx(0.8));
  CHECK(R(0, 0) == doctest::Approx(5.0));

  Rng rng(7);
  Matrix B = rng.gaussian_matrix(8, 3);
  auto [Qb, Rb] = thin_qr(B);
  CHECK((Qb.transpose() * Qb - Matrix::Identity(3, 3)).norm() <= 1e-13);
  CHECK((Qb * Rb - B).norm() <= 1e-12 * B.norm());
  for (Index i = 0; i < 3; ++i) CHECK(Rb(i, i) >= 0);

  // Orthonormal input reproduced up to column signs, R diagonal +-1 -> +1
  // under the sign convention.
  Matrix O = random_orthogonal(5, rng).leftCols(3);
  auto [Qo, Ro] = thin_qr(O);
  for (Index i = 0; i < 3; ++i) CHECK(std::abs(Ro(i, i)) == doctest::Approx(1.0));
  CHECK((Qo * Ro - O).norm() <= 1e-12);

  CHECK_THROWS(thin_qr(Matrix::Zero(2, 3)));
}

TEST_CASE("svd examples") {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 3;
  D(1, 1) = 1;
  Svd f = svd(D);
  CHECK(f.sigma(0) == doctest::Approx(3));
  CHECK(f.sigma(1) == doctest::Approx(1));
  CHECK((f.S.cwiseAbs() - Matrix::Identity(2, 2)).norm() < 1e-12);

  Rng rng(3);
  Vector u = rng.gaussian_vector(6), v = rng.gaussian_vector(4);
  Matrix R1 = u * v.transpose();
  Svd g = svd(R1);
  CHECK(g.sigma(0) == doctest::Approx(u.norm() * v.norm()));
  for (Index i = 1; i < g.sigma.size(); ++i) CHECK(g.sigma(i) <= 1e-13 * g.sigma(0));

  // Singular values match eig(A^T A) from an independent symmetric solver.
  Matrix A = rng.gaussian_matrix(6, 4);
  Svd fa = svd(A);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A.transpose() * A);
  Vector lam = eig.eigenvalues();  // increasing
  for (Index i = 0; i < 4; ++i)
    CHECK(fa.sigma(i) == doctest::Approx(std::sqrt(lam(3 - i))).epsilon(1e-10));

  // Reconstruction and orthonormality invariants.
  CHECK((fa.reconstruct() - A).norm() <= 1e-12 * A.norm() * 4);
  CHECK((fa.S.transpose() * fa.S - Matrix::Identity(4, 4)).norm() <= 1e-12 * 4);
  CHECK((fa.T.transpose() * fa.T - Matrix::Identity(4, 4)).norm() <= 1e-12 * 4);
}

TEST_CASE("svd deterministic sign convention") {
  Rng rng(19);
  Matrix A = rng.gaussian_matrix(7, 5);
  Svd f = svd(A);
  for (Index j = 0; j < f.S.cols(); ++j) {
    Index imax = 0;
    f.S.col(j).cwiseAbs().maxCoeff(&imax);
    CHECK(f.S(imax, j) >= 0);
  }
}

TEST_CASE("truncate_rank") {
  Matrix D = Matrix::Zero(3, 3);
  D(0, 0) = 3;
  D(1, 1) = 2;
  D(2, 2) = 1;
  LowRankFactors f2 = truncate_rank(D, 2);
  CHECK(spectral_norm(D - f2.product()) == doctest::Approx(1.0));

  Rng rng(5);
  Matrix G = rng.gaussian_matrix(6, 4);
  Matrix M = G.leftCols(3) * rng.gaussian_matrix(3, 5);  // rank 3
  LowRankFactors f = truncate_rank(M, 3);
  CHECK((M - f.product()).norm() <= 1e-12 * M.norm() * 10);

  Matrix B = rng.gaussian_matrix(7, 5);
  Svd fb = svd(B);
  for (Index rho = 1; rho <= 4; ++rho) {
    double tail = 0;
    for (Index j = rho; j < 5; ++j) tail += fb.sigma(j) * fb.sigma(j);
    double err = (B - truncate_rank(B, rho).product()).squaredNorm();
    CHECK(err == doctest::Approx(tail).epsilon(1e-10));
  }

  CHECK_THROWS(truncate_rank(B, 0));
  CHECK_THROWS(truncate_rank(B, 6));
}

TEST_CASE("truncation optimality spot check") {
  Rng rng(23);
  Matrix A = rng.gaussian_matrix(8, 6);
  const Index rho = 2;
  double best = spectral_norm(A - truncate_rank(A, rho).product());
  double s1 = spectral_norm(A);
  for (int t = 0; t < 100; ++t) {
    Matrix B = rng.gaussian_matrix(8, rho) * rng.gaussian_matrix(rho, 6);
    CHECK(best <= spectral_norm(A - B) + 1e-9 * s1);
  }
}

TEST_CASE("pseudo_inverse") {
  Rng rng(9);
  Matrix Q = random_orthogonal(4, rng);
  CHECK((pseudo_inverse(Q) - Q.transpose()).norm() < 1e-12);

  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 2;
  Matrix Dp = pseudo_inverse(D, 1e-8);
  CHECK(Dp(0, 0) == doctest::Approx(0.5));
  CHECK(Dp(1, 1) == doctest::Approx(0.0));

  Matrix A = rng.gaussian_matrix(5, 3);
  Matrix Ap = pseudo_inverse(A);
  CHECK((A * Ap * A - A).norm() <= 1e-11 * A.norm());
  CHECK((Ap * A * Ap - Ap).norm() <= 1e-11 * Ap.norm());
  CHECK((A * Ap - (A * Ap).transpose()).norm() <= 1e-11);
  CHECK((Ap * A - (Ap * A).transpose()).norm() <= 1e-11);

  CHECK(pseudo_inverse(Matrix::Zero(3, 2)).norm() == 0.0);
}

TEST_CASE("pseudo_inverse product sandwich norm bound") {
  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    Matrix A = rng.gaussian_matrix(5, 4), B = rng.gaussian_matrix(4, 4), C = rng.gaussian_matrix(4, 3);
    double lhs = spectral_norm(pseudo_inverse(A * B * C));
    double rhs = spectral_norm(pseudo_inverse(A)) * spectral_norm(pseudo_inverse(B)) *
                 spectral_norm(pseudo_inverse(C));
    CHECK(lhs <= rhs * (1 + 1e-8));
  }
}

TEST_CASE("numerical_rank") {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1;
  D(1, 1) = 1e-10;
  CHECK(numerical_rank(D, 1e-6, RankMode::Absolute) == 1);
  CHECK(numerical_rank(Matrix::Zero(3, 3), 1e-6) == 0);
  CHECK(numerical_rank(D, 1e-6, RankMode::Relative) == 1);
  CHECK(numerical_rank(D, 1e-11, RankMode::Relative) == 2);
  CHECK_THROWS(numerical_rank(D, 0.0));
}

TEST_CASE("norms and condition number") {
  Rng rng(13);
  Matrix Q = random_orthogonal(5, rng);
  CHECK(condition_number(Q) == doctest::Approx(1.0).epsilon(1e-12));

  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 4;
  D(1, 1) = 2;
  CHECK(spectral_norm(D) == doctest::Approx(4));
  CHECK(frobenius_norm(D) == doctest::Approx(std::sqrt(20.0)));
  CHECK(chebyshev_norm(D) == doctest::Approx(4));
  CHECK(condition_number(D) == doctest::Approx(2));

  for (int t = 0; t < 10; ++t) {
    Matrix A = rng.gaussian_matrix(6, 4);
    double sp = spectral_norm(A), fr = frobenius_norm(A);
    CHECK(sp <= fr * (1 + 1e-12));
    CHECK(fr <= std::sqrt(4.0) * sp * (1 + 1e-12));
  }

  CHECK_THROWS(condition_number(Matrix::Zero(2, 2)));
}

TEST_CASE("singular value perturbation (Weyl)") {
  Rng rng(17);
  Matrix A = rng.gaussian_matrix(6, 5);
  Matrix E = 0.01 * rng.gaussian_matrix(6, 5);
  Vector sa = svd(A).sigma, sb = svd(A + E).sigma;
  double en = spectral_norm(E);
  for (Index i = 0; i < 5; ++i) CHECK(std::abs(sa(i) - sb(i)) <= en * (1 + 1e-8));
}

TEST_CASE("IndexSet validation and selection") {
  CHECK_THROWS(IndexSet({0, 0}, 3));
  CHECK_THROWS(IndexSet({3}, 3));
  IndexSet I({2, 0}, 3);
  CHECK(I.size() == 2);
  CHECK(I.contains(2));
  CHECK(!I.contains(1));

  Matrix A(3, 3);
  A << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  Matrix R = select_rows(A, I);
  CHECK(R(0, 0) == 7);
  CHECK(R(1, 2) == 3);
  Matrix B = select_block(A, I, IndexSet({1}, 3));
  CHECK(B(0, 0) == 8);
  CHECK(B(1, 0) == 2);
}

TEST_CASE("rng determinism") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.gaussian() == b.gaussian());
  Matrix G1 = Rng(7).gaussian_matrix(4, 4), G2 = Rng(7).gaussian_matrix(4, 4);
  CHECK((G1 - G2).norm() == 0.0);
  auto p = Rng(9).permutation(10);
  auto q = Rng(9).permutation(10);
  CHECK(p == q);
}
