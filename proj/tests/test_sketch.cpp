#include "doctest.h"
#include <numbers>
#include "slra/linalg.hpp"
#include "slra/sketch.hpp"

#include <cmath>
#include <complex>

using namespace slra;

namespace {

// Dense oracle for Z_f(v): (i,j) -> v[i-j] below/on the diagonal, f*v[n+i-j] above.
Matrix circulant_oracle(Index n, double f, const Vector& v) {
  Matrix Z(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) Z(i, j) = (i >= j) ? v(i - j) : f * v(n + i - j);
  return Z;
}

Matrix h4() {
  Matrix H(4, 4);
  H << 1, 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1, -1, -1, 1;
  return H;
}

}  // namespace

TEST_CASE("abridged Hadamard displays") {
  // depth 1: (I_2 I_2; I_2 -I_2)
  Matrix M1 = materialize(*make_abridged_hadamard(4, 1));
  Matrix E1(4, 4);
  E1 << 1, 0, 1, 0, 0, 1, 0, 1, 1, 0, -1, 0, 0, 1, 0, -1;
  CHECK((M1 - E1).norm() == 0.0);

  // full depth on n=4 gives the dense Walsh-Hadamard matrix
  CHECK((materialize(*make_abridged_hadamard(4, 2)) - h4()).norm() == 0.0);

  // n=8 full depth: H_8 = (H_4 H_4; H_4 -H_4)
  Matrix H8(8, 8);
  H8.topLeftCorner(4, 4) = h4();
  H8.topRightCorner(4, 4) = h4();
  H8.bottomLeftCorner(4, 4) = h4();
  H8.bottomRightCorner(4, 4) = -h4();
  CHECK((materialize(*make_abridged_hadamard(8, 3)) - H8).norm() == 0.0);

  CHECK_THROWS(make_abridged_hadamard(6, 2));
}

TEST_CASE("abridged Fourier matches the DFT display") {
  CMatrix F = materialize_complex(*make_abridged_fourier(4, 2));
  const std::complex<double> i(0, 1);
  CMatrix E(4, 4);
  E << 1, 1, 1, 1, 1, i, -1, -i, 1, -1, 1, -1, 1, -i, -1, i;
  CHECK((F - E).norm() < 1e-14);

  // full-depth n=8 equals omega^{jk}
  CMatrix F8 = materialize_complex(*make_abridged_fourier(8, 3));
  for (Index a = 0; a < 8; ++a)
    for (Index b = 0; b < 8; ++b) {
      auto w = std::exp(std::complex<double>(0, 2 * M_PI * a * b / 8.0));
      CHECK(std::abs(F8(a, b) - w) < 1e-13);
    }

  // abridged depth is unitary up to 2^d and has 2^d nonzeros per row
  CMatrix A = materialize_complex(*make_abridged_fourier(8, 2));
  CHECK((A * A.adjoint() - 4.0 * CMatrix::Identity(8, 8)).norm() < 1e-12);
  for (Index r = 0; r < 8; ++r) {
    int nz = 0;
    for (Index c = 0; c < 8; ++c)
      if (std::abs(A(r, c)) > 1e-14) ++nz;
    CHECK(nz == 4);
  }

  // transpose path consistent with the materialized transpose
  Rng rng(5);
  CMatrix X = rng.gaussian_matrix(8, 3).cast<std::complex<double>>();
  auto op = make_abridged_fourier(8, 2);
  CHECK((op->apply_transpose_complex(X) - A.transpose() * X).norm() < 1e-12);
}

TEST_CASE("permutation and sign diagonal") {
  std::vector<Index> rev{3, 2, 1, 0};
  Matrix P = materialize(*make_permutation(rev));
  for (Index i = 0; i < 4; ++i) CHECK(P(i, 3 - i) == 1.0);
  CHECK(P.sum() == 4.0);

  Rng rng(1);
  auto op = gen_permutation(8, rng);
  Matrix M = materialize(*op);
  CHECK((M * M.transpose() - Matrix::Identity(8, 8)).norm() < 1e-14);
  Matrix X = rng.gaussian_matrix(8, 3);
  CHECK((op->apply_transpose(op->apply(X)) - X).norm() == 0.0);

  auto d = gen_sign_diagonal(8, rng);
  Matrix D = materialize(*d);
  CHECK((D * D - Matrix::Identity(8, 8)).norm() == 0.0);
  CHECK_THROWS(make_sign_diagonal(Vector::Zero(3)));
}

TEST_CASE("sparse circulant against dense oracle") {
  Rng rng(2);
  const Index n = 16, s = 3;
  auto op = gen_sparse_circulant(n, s, rng);
  Matrix Z = materialize(*op);
  // reconstruct v from the first column and compare full structure
  Vector v = Z.col(0);
  double f = 0;
  for (Index i = 1; i < n; ++i)
    if (Z(0, i) != 0) f = Z(0, i) / v(n - i);
  CHECK((Z - circulant_oracle(n, f, v)).norm() == 0.0);
  for (Index j = 0; j < n; ++j) CHECK((Z.col(j).array() != 0).count() == s);

  Matrix X = rng.gaussian_matrix(n, 5);
  CHECK((op->apply(X) - Z * X).norm() < 1e-13 * Z.norm() * X.norm());
  CHECK((op->apply_transpose(X) - Z.transpose() * X).norm() < 1e-13 * Z.norm() * X.norm());
}

TEST_CASE("inverse bidiagonal") {
  // all-zero subdiagonal acts as the identity
  auto id = make_inverse_bidiagonal(Vector::Zero(5));
  Matrix X = Rng(3).gaussian_matrix(6, 2);
  CHECK((id->apply(X) - X).norm() == 0.0);

  Rng rng(4);
  const Index n = 64;
  auto op = gen_inverse_bidiagonal(n, rng);
  Matrix B = materialize(*op);
  // it inverts the unit bidiagonal with negated stored signs
  Vector sub = Vector::Zero(n - 1);
  Matrix L = Matrix::Identity(n, n);
  // recover subdiagonal of B's inverse from B itself: L = B^{-1}
  L = B.inverse();
  CHECK((L * B - Matrix::Identity(n, n)).norm() < 1e-10);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 2; j <= std::min(n - 1, i + 3); ++j) CHECK(std::abs(L(j, i)) < 1e-12);

  // The inverse is unit-triangular with +-1 fill, so kappa <= ||B||_F * ||B^-1||
  // <= sqrt(2) n; the sqrt(2n) folklore bound does not hold for this family.
  CHECK(condition_number(B) <= std::numbers::sqrt2 * n * (1 + 1e-8));

  Matrix Y = rng.gaussian_matrix(n, 3);
  CHECK((op->apply_transpose(Y) - B.transpose() * Y).norm() < 1e-11 * B.norm() * Y.norm());

  auto up = make_inverse_bidiagonal(Vector::Ones(3), false);
  Matrix U = materialize(*up);
  CHECK(std::abs(U(0, 3) - 1.0) < 1e-14);  // upper triangular fill
  CHECK(U.isUpperTriangular());
}

TEST_CASE("householder chain is orthogonal") {
  Rng rng(6);
  auto op = gen_householder_chain(16, 4, rng);
  Matrix R = materialize(*op);
  CHECK((R * R.transpose() - Matrix::Identity(16, 16)).norm() < 1e-12);
  Matrix X = rng.gaussian_matrix(16, 3);
  CHECK((op->apply_transpose(X) - R.transpose() * X).norm() < 1e-12);
}

TEST_CASE("sub-identity and composites") {
  IndexSet sel({1, 3}, 4);
  auto op = make_sub_identity(sel, 4);
  Matrix M(4, 2);
  M << 1, 2, 3, 4, 5, 6, 7, 8;
  Matrix S = op->apply(M);
  CHECK(S(0, 0) == 3.0);
  CHECK(S(1, 1) == 8.0);
  CHECK((op->apply_transpose(S).row(0).array() == 0).all());

  // sum of two permutations: row sums = 2
  Rng rng(7);
  auto sum = make_sum({gen_permutation(6, rng), gen_permutation(6, rng)}, {1, 1});
  Matrix ones = Matrix::Ones(6, 1);
  CHECK((sum->apply(ones).array() == 2).all());

  // product composite equals product of materializations
  auto prod = make_product({gen_permutation(8, rng), gen_sign_diagonal(8, rng),
                            make_abridged_hadamard(8, 2)});
  Matrix Pm = materialize(*prod);
  Matrix X = rng.gaussian_matrix(8, 3);
  CHECK((prod->apply(X) - Pm * X).norm() < 1e-13 * Pm.norm() * X.norm());
  CHECK((prod->apply_transpose(X) - Pm.transpose() * X).norm() < 1e-13 * Pm.norm() * X.norm());
}

TEST_CASE("ASPH is orthogonal up to 2^d") {
  Rng rng(8);
  auto op = gen_asph(16, 2, rng);
  Matrix A = materialize(*op);
  CHECK((A.transpose() * A - 4.0 * Matrix::Identity(16, 16)).norm() < 1e-11);
}

TEST_CASE("take_columns") {
  auto ah = make_abridged_hadamard(4, 2);
  Rng rng(9);
  auto slice = take_columns(ah, 2, ColumnMode::Leftmost, rng);
  Matrix S = materialize(*slice);
  CHECK((S - h4().leftCols(2)).norm() == 0.0);

  // leftmost columns of a permutation give a sub-identity-like selector
  std::vector<Index> idv{0, 1, 2, 3};
  auto eye = make_permutation(idv);
  Matrix E = materialize(*take_columns(eye, 2, ColumnMode::Leftmost, rng));
  CHECK((E - Matrix::Identity(4, 4).leftCols(2)).norm() == 0.0);

  // kappa(slice) <= kappa(full) across random structured ops
  for (int t = 0; t < 50; ++t) {
    Rng r(100 + t);
    OpPtr full;
    switch (t % 4) {
      case 0: full = gen_asph(16, 2, r); break;
      case 1: full = gen_sparse_circulant(16, 3, r); break;
      case 2: full = gen_inverse_bidiagonal(16, r); break;
      default: full = gen_householder_chain(16, 3, r); break;
    }
    auto sl = take_columns(full, 8, ColumnMode::Random, r);
    CHECK(condition_number(materialize(*sl)) <=
          condition_number(materialize(*full)) * (1 + 1e-8));
  }

  CHECK_THROWS(take_columns(ah, 5, ColumnMode::Leftmost, rng));
}

TEST_CASE("apply/materialize equivalence both sides") {
  for (Index n : {4, 8, 16, 64}) {
    Rng rng(40 + n);
    std::vector<OpPtr> ops{
        gen_permutation(n, rng),       gen_sign_diagonal(n, rng),
        make_abridged_hadamard(n, 2),  gen_sparse_circulant(n, 3, rng),
        gen_inverse_bidiagonal(n, rng), gen_householder_chain(n, 3, rng),
        gen_gaussian(n, n, rng),       gen_asph(n, 2, rng, true)};
    Matrix M = rng.gaussian_matrix(n, 3);
    Matrix W = rng.gaussian_matrix(3, n);
    for (auto& op : ops) {
      Matrix D = materialize(*op);
      double scale = 1e-12 * D.norm() * M.norm() + 1e-13;
      CHECK((apply(*op, M, Side::Left) - D * M).norm() <= scale);
      CHECK((apply(*op, W, Side::Right) - W * D).norm() <= scale);
    }
  }
}

TEST_CASE("nonzeros per basis vector respect kind sparsity") {
  Rng rng(50);
  auto check_nnz = [](const SketchOperator& op, Index bound) {
    Matrix I = Matrix::Identity(op.cols(), op.cols());
    for (Index j = 0; j < op.cols(); ++j) {
      Matrix col = op.apply(I.col(j));
      CHECK((col.array() != 0).count() <= bound);
    }
  };
  check_nnz(*gen_permutation(16, rng), 1);
  check_nnz(*gen_sign_diagonal(16, rng), 1);
  check_nnz(*make_sub_identity(IndexSet({2, 5}, 16), 16), 1);
  check_nnz(*make_abridged_hadamard(16, 2), 4);
  check_nnz(*gen_sparse_circulant(16, 3, rng), 3);
}

TEST_CASE("flop budgets") {
  Rng rng(60);
  const Index n = 64, c = 8;
  Matrix M = rng.gaussian_matrix(n, c);

  reset_op_counter();
  make_abridged_hadamard(n, 3)->apply(M);
  CHECK(op_counter().adds <= 3ull * n * c);
  CHECK(op_counter().muls == 0);

  reset_op_counter();
  gen_inverse_bidiagonal(n, rng)->apply(M);
  CHECK(op_counter().total() <= 2ull * n * c);

  reset_op_counter();
  gen_sparse_circulant(n, 4, rng)->apply(M);
  CHECK(op_counter().total() <= (2 * 4 - 1) * static_cast<unsigned long long>(n) * c);

  reset_op_counter();
  make_sub_identity(IndexSet({0, 5, 9}, n), n)->apply(M);
  CHECK(op_counter().total() == 0);
}

TEST_CASE("determinism of generation and application") {
  auto build = [] {
    Rng rng(123);
    return gen_asph(32, 3, rng, true);
  };
  Matrix A = materialize(*build()), B = materialize(*build());
  CHECK((A - B).norm() == 0.0);
  auto d1 = build()->descriptor().dump(), d2 = build()->descriptor().dump();
  CHECK(d1 == d2);
}

TEST_CASE("bidiagonal product generator") {
  // T=0 convention: identity before standardization
  Rng r0(1);
  CHECK((gen_bidiagonal_product(5, 0, r0, false) - Matrix::Identity(5, 5)).norm() == 0.0);

  // a single factor with identity permutation is the raw bidiagonal factor
  Matrix B = bidiagonal_factor(3, {1, 1, 1});
  CHECK(B(0, 2) == 1.0);
  CHECK(B(1, 0) == 1.0);
  CHECK(B(2, 1) == 1.0);
  CHECK(B.diagonal().isOnes());

  // the dense product and the single-column path agree for equal seeds
  Rng ra(77), rb(77);
  Matrix G = gen_bidiagonal_product(16, 5, ra, false);
  Vector col = bidiagonal_product_column(16, 5, 7, rb);
  CHECK((G.col(7) - col).norm() == 0.0);

  // standardized columns have zero mean / unit variance
  Rng rc(78);
  Matrix S = gen_bidiagonal_product(32, 8, rc, true);
  for (Index j = 0; j < 32; ++j) {
    CHECK(std::abs(S.col(j).mean()) < 1e-12);
    CHECK(std::abs((S.col(j).array()).square().mean() - 1.0) < 1e-10);
  }
}

TEST_CASE("ks_normality") {
  int passes = 0;
  for (int t = 0; t < 100; ++t) {
    Rng rng(1000 + t);
    std::vector<double> sample(10000);
    for (auto& x : sample) x = rng.gaussian();
    if (ks_normality(sample).pass) ++passes;
  }
  CHECK(passes >= 94);

  CHECK_THROWS(ks_normality(std::vector<double>(100, 1.0)));

  Rng rng(5);
  std::vector<double> unif(10000);
  for (auto& x : unif) x = rng.uniform();
  CHECK_FALSE(ks_normality(unif).pass);
}
