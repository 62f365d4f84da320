#include "doctest.h"
#include "slra/errors.hpp"
#include "slra/lra.hpp"
#include "slra/testgen.hpp"

#include <cmath>

using namespace slra;

TEST_CASE("range_finder is exact on exact-rank inputs") {
  for (int t = 0; t < 10; ++t) {
    Rng rng(700 + t);
    const Index m = 48, n = 40, r = 6, l = 10;
    Matrix M = gen_factor_gaussian(m, n, r, 0.0, rng);
    OpPtr H = gen_gaussian(n, l, rng);
    for (RangeVariant v : {RangeVariant::BasisQr, RangeVariant::TruncatedRankR}) {
      LowRankFactors f = range_finder(M, *H, r, v);
      CHECK(spectral_norm(M - f.product()) <= 1e-10 * spectral_norm(M));
      if (v == RangeVariant::TruncatedRankR) CHECK(f.l() == r);
    }
  }
}

TEST_CASE("range_finder fails on rank-deficient sketches") {
  Rng rng(20);
  OpPtr H = gen_gaussian(16, 4, rng);
  CHECK_THROWS_AS(range_finder(Matrix::Zero(16, 16), *H, 1), RangeFailure);
  Matrix M1 = rng.gaussian_matrix(16, 1) * rng.gaussian_matrix(1, 16);
  CHECK_THROWS_AS(range_finder(M1, *H, 2), RangeFailure);
}

TEST_CASE("range_finder with structured sketch on graded spectrum") {
  double sum = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    Rng rng(800 + t);
    const Index n = 256, r = 8;
    Matrix M = gen_svd_profile(n, r, rng);
    OpPtr H = take_columns(gen_asph(n, 3, rng), r, ColumnMode::Random, rng);
    LowRankFactors f = range_finder(M, *H, r);
    sum += spectral_norm(M - f.product());
  }
  CHECK(sum / trials <= 1e-6);
}

TEST_CASE("inclusion: basis lies in the range of the sketch") {
  Rng rng(21);
  const Index m = 32, n = 24, l = 8;
  Matrix M = rng.gaussian_matrix(m, n);
  OpPtr H = gen_gaussian(n, l, rng);
  LowRankFactors f = range_finder(M, *H, 4);
  Matrix MH = M * materialize(*H);
  Matrix Q = thin_qr(MH).first;
  CHECK(spectral_norm(f.U - Q * (Q.transpose() * f.U)) <= 1e-10);
}

TEST_CASE("V is the optimal right factor") {
  Rng rng(22);
  const Index m = 32, n = 24, l = 6;
  Matrix M = rng.gaussian_matrix(m, n);
  OpPtr H = gen_gaussian(n, l, rng);
  LowRankFactors f = range_finder(M, *H, 4);
  const double base = frobenius_norm(M - f.product());
  for (double delta : {1e-3, 1e-1})
    for (int t = 0; t < 25; ++t) {
      Matrix Vp = f.V + delta * rng.gaussian_matrix(l, n);
      CHECK(frobenius_norm(M - f.U * Vp) >= base - 1e-12);
    }
}

TEST_CASE("QR-basis variant has unit pseudo-inverse norm") {
  Rng rng(23);
  Matrix M = rng.gaussian_matrix(40, 30);
  OpPtr H = gen_gaussian(30, 8, rng);
  LowRankFactors f = range_finder(M, *H, 8);
  CHECK(spectral_norm(pseudo_inverse(f.U)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("achieved error is orthogonally invariant") {
  Rng rng(24);
  const Index n = 32, l = 8;
  Matrix M = gen_factor_gaussian(n, n, 4, 1e-3, rng);
  Matrix Hd = rng.gaussian_matrix(n, l);
  Matrix Q = thin_qr(rng.gaussian_matrix(n, n)).first;
  Matrix Qb = thin_qr(rng.gaussian_matrix(n, n)).first;

  OpPtr H = make_gaussian(Hd);
  LowRankFactors f = range_finder(M, *H, 4);
  const double e1 = spectral_norm(M - f.product());

  Matrix M2 = Q * M * Qb;
  OpPtr H2 = make_gaussian(Matrix(Qb.transpose() * Hd));
  LowRankFactors f2 = range_finder(M2, *H2, 4);
  const double e2 = spectral_norm(M2 - f2.product());
  CHECK(e2 == doctest::Approx(e1).epsilon(1e-9));
}

TEST_CASE("lra_premult matches range_finder when F is the identity") {
  Rng rng(25);
  const Index m = 30, n = 24;
  Matrix M = rng.gaussian_matrix(m, n);
  OpPtr H = gen_gaussian(n, 6, rng);
  OpPtr F = make_sub_identity(IndexSet::iota(m, m), m);
  LowRankFactors a = range_finder(M, *H, 4);
  LowRankFactors b = lra_premult(M, *F, *H, 4);
  CHECK(spectral_norm(a.U - b.U) <= 1e-12);
  CHECK(spectral_norm(a.V - b.V) <= 1e-12);
}

TEST_CASE("lra_premult is exact on exact-rank inputs") {
  for (int t = 0; t < 10; ++t) {
    Rng rng(900 + t);
    const Index m = 48, n = 40, r = 5, l = 8, k = 12;
    Matrix M = gen_factor_gaussian(m, n, r, 0.0, rng);
    OpPtr H = gen_gaussian(n, l, rng);
    OpPtr F = gen_gaussian(k, m, rng);
    LowRankFactors f = lra_premult(M, *F, *H, r);
    CHECK(spectral_norm(M - f.product()) <= 1e-9 * spectral_norm(M));
  }
}

TEST_CASE("lra_premult residual identity and impact factor") {
  Rng rng(26);
  const Index m = 8, n = 8, r = 2, l = 3, k = 5;
  for (int t = 0; t < 20; ++t) {
    Matrix M = rng.gaussian_matrix(m, n);
    Matrix Hd = rng.gaussian_matrix(n, l);
    Matrix Fd = rng.gaussian_matrix(k, m);
    LowRankFactors f = lra_premult(M, *make_gaussian(Fd), *make_gaussian(Hd), r);

    // residual factors through the oblique projector complement
    Matrix FU = Fd * f.U;
    Matrix P = Matrix::Identity(m, m) - f.U * pseudo_inverse(FU) * Fd;
    Matrix resid = P * (M - f.U * (f.U.transpose() * M));
    CHECK(spectral_norm(M - f.product() - resid) <= 1e-9 * spectral_norm(M));

    const double impact = spectral_norm(P);
    const double bound = 1.0 + spectral_norm(f.U) * spectral_norm(pseudo_inverse(FU)) *
                                   spectral_norm(Fd);
    CHECK(impact <= bound * (1 + 1e-12));
  }
}

TEST_CASE("lra_premult rank failure") {
  Rng rng(27);
  Matrix M = gen_factor_gaussian(16, 16, 3, 0.0, rng);
  OpPtr H = gen_gaussian(16, 4, rng);
  OpPtr F = make_gaussian(Matrix::Zero(5, 16));
  CHECK_THROWS_AS(lra_premult(M, *F, *H, 3), PremultRankFailure);
}

TEST_CASE("two_stage_truncate") {
  Rng rng(28);
  const Index m = 40, n = 32, l = 8;
  LowRankFactors f;
  f.U = rng.gaussian_matrix(m, l);
  f.V = rng.gaussian_matrix(l, n);
  f.target_rank = l;

  // r = l: same product up to orthogonal mixing
  LowRankFactors same = two_stage_truncate(f, l);
  CHECK(spectral_norm(f.product() - same.product()) <= 1e-12 * spectral_norm(f.product()));

  // matches the dense SVD truncation of the product
  LowRankFactors t3 = two_stage_truncate(f, 3);
  LowRankFactors dense = truncate_rank(f.product(), 3);
  CHECK(spectral_norm(t3.product() - dense.product()) <= 1e-9 * spectral_norm(f.product()));

  CHECK_THROWS(two_stage_truncate(f, l + 1));
}

TEST_CASE("two-stage truncation bound") {
  // || (UV)_r - M ||_F <= tau_{r+1}(M) + 2 || UV - M ||_F
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    Rng rng(1000 + t);
    const Index n = 64, r = 4, l = 8;
    Matrix M = gen_factor_gaussian(n, n, r, 1e-4, rng);
    OpPtr H = gen_gaussian(n, l, rng);
    LowRankFactors f = range_finder(M, *H, r);
    LowRankFactors g = two_stage_truncate(f, r);

    Svd ms = svd(M);
    double tail = 0;
    for (Index j = r; j < n; ++j) tail += ms.sigma(j) * ms.sigma(j);
    const double tau = std::sqrt(tail);
    const double lhs = frobenius_norm(M - g.product());
    const double rhs = tau + 2.0 * frobenius_norm(M - f.product());
    CHECK(lhs <= rhs * (1 + 1e-8));
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("deterministic error diagnostic") {
  Rng rng(29);
  {
    Matrix M = gen_factor_gaussian(24, 24, 3, 0.0, rng);
    OpPtr H = gen_gaussian(24, 6, rng);
    auto [bound, achieved] = deterministic_error_diagnostic(M, *H, 3);
    CHECK(bound <= 1e-9 * spectral_norm(M));
    CHECK(achieved <= 1e-10 * spectral_norm(M));
  }
  {
    // orthogonal square H: the achieved error equals the SVD tail head
    const Index n = 16, r = 4;
    Matrix M = rng.gaussian_matrix(n, n);
    Matrix Q = thin_qr(rng.gaussian_matrix(n, n)).first;
    auto [bound, achieved] = deterministic_error_diagnostic(M, *make_gaussian(Q), r);
    Svd f = svd(M);
    CHECK(achieved == doctest::Approx(f.sigma(r)).epsilon(1e-10));
    CHECK(bound >= achieved * (1 - 1e-10));
  }
  for (int t = 0; t < 100; ++t) {
    Rng r2(1100 + t);
    const Index n = 64, r = 4;
    Matrix M = r2.gaussian_matrix(n, n);
    OpPtr H = gen_gaussian(n, 2 * r, r2);
    auto [bound, achieved] = deterministic_error_diagnostic(M, *H, r);
    CHECK(achieved * achieved <= bound * bound * (1 + 1e-6));
  }
  CHECK_THROWS(deterministic_error_diagnostic(Matrix::Zero(600, 600),
                                              *gen_gaussian(600, 4, rng), 2));
}

TEST_CASE("posterior error estimate") {
  Rng rng(30);
  const Index m = 40, n = 50, l = 3;
  LowRankFactors zero;
  zero.U = Matrix::Zero(m, l);
  zero.V = Matrix::Zero(l, n);
  zero.target_rank = l;

  // constant error surface: exact recovery of |c| sqrt(mn)
  FunctionOracle cst(m, n, [](Index, Index) { return -0.75; });
  auto est = posterior_error_estimate(cst, zero, 10, 12, rng);
  CHECK(est.estimate_frobenius ==
        doctest::Approx(0.75 * std::sqrt(double(m * n))).epsilon(1e-12));
  CHECK(est.has_interval);
  CHECK(est.ci_lo <= est.estimate_frobenius);
  CHECK(est.ci_hi >= est.estimate_frobenius);

  FunctionOracle zf(m, n, [](Index, Index) { return 0.0; });
  CHECK(posterior_error_estimate(zf, zero, 5, 5, rng).estimate_frobenius == 0.0);

  // reads exactly q*s entries
  Matrix M = rng.gaussian_matrix(m, n);
  DenseOracle o(M);
  posterior_error_estimate(o, zero, 7, 9, rng);
  CHECK(o.accesses() == 63);
}

TEST_CASE("posterior interval coverage") {
  const Index m = 64, n = 64, l = 2;
  int covered = 0;
  for (int t = 0; t < 100; ++t) {
    Rng rng(1200 + t);
    Matrix U = rng.gaussian_matrix(m, l), V = rng.gaussian_matrix(l, n);
    Matrix E = 0.05 * rng.gaussian_matrix(m, n);
    Matrix M = U * V + E;
    LowRankFactors f;
    f.U = U;
    f.V = V;
    f.target_rank = l;
    auto est = posterior_error_estimate(M, f, 20, 20, rng);
    const double truth = frobenius_norm(E);
    if (truth >= est.ci_lo && truth <= est.ci_hi) ++covered;
  }
  CHECK(covered >= 90);
}
