#include "doctest.h"
#include "slra/errors.hpp"
#include "slra/lsr.hpp"
#include "slra/testgen.hpp"

#include <cmath>
#include <limits>

using namespace slra;

namespace {

// Normal-equations oracle for a full-column-rank A.
Vector normal_solve(const Matrix& A, const Vector& b) {
  return (A.transpose() * A).ldlt().solve(A.transpose() * b);
}

}  // namespace

TEST_CASE("solve_exact") {
  LsrProblem p;
  p.A = Matrix::Zero(3, 2);
  p.A(0, 0) = 1;
  p.A(1, 1) = 1;
  p.b = Vector(3);
  p.b << 1, 2, 0;
  Vector x = solve_exact(p);
  CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x(1) == doctest::Approx(2.0).epsilon(1e-12));

  Rng rng(11);
  LsrProblem q;
  q.A = rng.gaussian_matrix(50, 5);
  q.b = rng.gaussian_vector(50);
  CHECK((solve_exact(q) - normal_solve(q.A, q.b)).norm() < 1e-10);
  CHECK(residual_ratio(q, solve_exact(q)) == doctest::Approx(1.0).epsilon(1e-12));

  // any other x does strictly worse
  for (int t = 0; t < 10; ++t) {
    Vector y = solve_exact(q) + 0.1 * rng.gaussian_vector(5);
    CHECK(residual_norm(q, y) > residual_norm(q, solve_exact(q)));
  }

  LsrProblem bad;
  bad.A = rng.gaussian_matrix(3, 3);
  bad.b = rng.gaussian_vector(3);
  CHECK_THROWS_AS(solve_exact(bad), std::invalid_argument);
}

TEST_CASE("residual_ratio consistent system") {
  Rng rng(12);
  LsrProblem p;
  p.A = rng.gaussian_matrix(20, 4);
  Vector x0 = rng.gaussian_vector(4);
  p.b = p.A * x0;  // optimum residual ~ 0
  CHECK(residual_ratio(p, x0) == std::numeric_limits<double>::infinity());
}

TEST_CASE("sketch_solve with a full permutation is exact") {
  Rng rng(13);
  LsrProblem p;
  p.A = rng.gaussian_matrix(30, 3);
  p.b = rng.gaussian_vector(30);
  OpPtr F = gen_permutation(30, rng);
  LsrReport rep = sketch_solve(p, *F, true);
  CHECK(rep.k == 30);
  CHECK(*rep.ratio == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.sketched_residual == doctest::Approx(*rep.true_residual).epsilon(1e-10));
}

TEST_CASE("sketch_solve recovers consistent systems") {
  Rng rng(14);
  LsrProblem p;
  p.A = rng.gaussian_matrix(64, 6);
  Vector x0 = rng.gaussian_vector(6);
  p.b = p.A * x0;
  OpPtr F = gen_gaussian(8, 64, rng);
  LsrReport rep = sketch_solve(p, *F);
  CHECK((rep.x_hat - x0).norm() < 1e-8);
  CHECK(rep.sketched_residual < 1e-10);
}

TEST_CASE("sketch_solve rank failure") {
  Rng rng(15);
  LsrProblem p;
  p.A = rng.gaussian_matrix(32, 4);
  p.b = rng.gaussian_vector(32);
  OpPtr F = make_gaussian(Matrix::Zero(6, 32));
  CHECK_THROWS_AS(sketch_solve(p, *F), SketchRankFailure);
}

TEST_CASE("gaussian sketch residual ratio stays small") {
  const Index m = 256, d = 10, k = 6 * d;
  double sum = 0;
  for (int t = 0; t < 20; ++t) {
    Rng rng(300 + t);
    LsrProblem p = gen_lsr_family(LsrFamily::Gaussian, m, d, rng);
    OpPtr F = gen_gaussian(k, m, rng);
    LsrReport rep = sketch_solve(p, *F, true);
    CHECK(*rep.ratio >= 1.0 - 1e-12);
    CHECK(*rep.ratio < 2.0);
    sum += *rep.ratio;
  }
  CHECK(sum / 20 < 1.3);
}

TEST_CASE("larger sketches give better ratios on average") {
  const Index m = 256, d = 8;
  double mean_small = 0, mean_large = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    Rng rng(400 + t);
    LsrProblem p = gen_lsr_family(LsrFamily::Gaussian, m, d, rng);
    OpPtr Fs = gen_gaussian(2 * d, m, rng);
    OpPtr Fl = gen_gaussian(6 * d, m, rng);
    mean_small += *sketch_solve(p, *Fs, true).ratio;
    mean_large += *sketch_solve(p, *Fl, true).ratio;
  }
  CHECK(mean_large < mean_small);
  CHECK(mean_large / trials < 1.25);
}

TEST_CASE("structured sketches match gaussian quality") {
  const Index m = 512, d = 8, k = 6 * d;
  for (int kind = 0; kind < 2; ++kind) {
    double sum = 0;
    for (int t = 0; t < 10; ++t) {
      Rng rng(500 + 31 * kind + t);
      LsrProblem p = gen_lsr_family(LsrFamily::Gaussian, m, d, rng);
      OpPtr F = (kind == 0)
                    ? make_product({make_sub_identity(IndexSet::iota(k, m), m),
                                    gen_asph(m, 3, rng)})
                    : gen_gaussian(k, m, rng);
      LsrReport rep = sketch_solve(p, *F, true);
      sum += *rep.ratio;
    }
    CHECK(sum / 10 < 1.5);
  }
}

TEST_CASE("observed singular-value band contains the sketched ratios") {
  // Orthonormal-row F scaled by a, Gaussian M scaled by b, a b sqrt(k) = 1:
  // every ||F M z|| / ||M z|| ratio lands in the band predicted by the extreme
  // singular-value deviations xi_k, xi_m of the scaled factors.
  const Index m = 128, k = 32, d = 5;
  Rng rng(16);
  Matrix Q = thin_qr(rng.gaussian_matrix(m, k)).first.transpose();  // k x m
  Matrix G = rng.gaussian_matrix(m, d + 1);
  const double a = 1.0, bscale = 1.0 / (a * std::sqrt(double(k)));
  Matrix F = a * Q;
  Matrix M = bscale * G;

  auto extremes = [](const Matrix& X, double scale) {
    Svd f = svd(X);
    const double hi = f.sigma(0) / scale, lo = f.sigma(f.sigma.size() - 1) / scale;
    return std::max(std::abs(hi - 1.0), std::abs(1.0 - lo));
  };
  const double xi_m = extremes(G, std::sqrt(double(m)));
  const double xi_k = extremes(Q * G, std::sqrt(double(k)));
  const double lo = (1.0 - xi_k) / (1.0 + xi_m);
  const double hi = (1.0 + xi_k) / (1.0 - xi_m);
  REQUIRE(xi_m < 1.0);
  REQUIRE(xi_k < 1.0);

  int inside = 0;
  for (int t = 0; t < 100; ++t) {
    Vector z = rng.gaussian_vector(d + 1);
    const double num = (F * (M * z)).norm();
    const double den = (M * z).norm();
    const double ratio = num / den * std::sqrt(double(m) / double(k));
    if (ratio >= lo * (1 - 1e-12) && ratio <= hi * (1 + 1e-12)) ++inside;
  }
  CHECK(inside == 100);
}

TEST_CASE("solve_with_retries recovers after a blind sub-identity sketch") {
  // A is supported on one row the initial sketch never reads: attempt 1 is
  // rank deficient and only a permuted retry can see the data.
  const Index m = 32;
  LsrProblem p;
  p.A = Matrix::Zero(m, 1);
  p.A(20, 0) = 1.0;
  p.b = 3.0 * p.A.col(0);
  OpPtr base = make_sub_identity(IndexSet::iota(8, m), m);

  Rng rng(17);
  LsrReport rep = solve_with_retries(p, base, {}, 40, 1.5, rng);
  CHECK(rep.attempts > 1);
  CHECK(rep.validated);
  CHECK(rep.x_hat(0) == doctest::Approx(3.0).epsilon(1e-12));

  // With retries disabled the failure is reported honestly.
  Rng rng2(18);
  CHECK_THROWS_AS(solve_with_retries(p, base, {}, 0, 1.5, rng2), SketchRankFailure);
}

TEST_CASE("solve_with_retries validates well-posed inputs on the first attempt") {
  int first_try = 0;
  for (int t = 0; t < 50; ++t) {
    Rng rng(600 + t);
    LsrProblem p = gen_lsr_family(LsrFamily::Gaussian, 128, 6, rng);
    OpPtr base = gen_gaussian(36, 128, rng);
    LsrReport rep = solve_with_retries(p, base, {}, 3, 2.0, rng);
    CHECK(rep.validated);
    if (rep.attempts == 1) ++first_try;
  }
  CHECK(first_try >= 47);
}

TEST_CASE("coherent inputs need pre-processing for sparse sketches") {
  // Row sampling alone misses the mass of a coherent input; composing with a
  // random permutation family rescues it.
  const Index m = 64, d = 4;
  Rng rng(19);
  LsrProblem p = gen_lsr_family(LsrFamily::Coherent, m, d, rng);
  // select 48 rows that all miss the diagonal block carrying the signal
  std::vector<Index> sel;
  for (Index i = d; i < d + 48; ++i) sel.push_back(i);
  OpPtr base = make_sub_identity(IndexSet(sel, m), m);

  std::vector<OpPtr> q_family;
  for (int i = 0; i < 6; ++i) q_family.push_back(gen_permutation(m, rng));
  LsrReport rep = solve_with_retries(p, base, q_family, 30, 2.0, rng);
  CHECK(rep.attempts > 1);
  CHECK(residual_ratio(p, rep.x_hat) < 3.0);
}
