#include "slra/lsr.hpp"

#include <Eigen/QR>
#include <cmath>
#include <limits>

#include "slra/errors.hpp"

namespace slra {

namespace {

void validate(const LsrProblem& p) {
  if (p.A.rows() <= p.A.cols() || p.A.cols() < 1)
    throw std::invalid_argument("lsr: need m > d >= 1");
  if (p.b.size() != p.A.rows()) throw std::invalid_argument("lsr: b length mismatch");
}

}  // namespace

Vector solve_exact(const LsrProblem& p) {
  validate(p);
  return pseudo_inverse(p.A) * p.b;
}

double residual_norm(const LsrProblem& p, const Vector& x) {
  return (p.A * x - p.b).norm();
}

double residual_ratio(const LsrProblem& p, const Vector& x_hat) {
  const double opt = residual_norm(p, solve_exact(p));
  if (opt < 1e-14 * p.b.norm())
    return std::numeric_limits<double>::infinity();
  return residual_norm(p, x_hat) / opt;
}

LsrReport sketch_solve(const LsrProblem& p, const SketchOperator& F,
                       bool with_true_residual) {
  validate(p);
  const Index d = p.A.cols();
  if (F.cols() != p.A.rows()) throw std::invalid_argument("sketch_solve: F cols != m");
  if (F.rows() <= d) throw std::invalid_argument("sketch_solve: need k > d");

  // One pass over the stacked W = (A | b).
  Matrix W(p.A.rows(), d + 1);
  W.leftCols(d) = p.A;
  W.col(d) = p.b;
  Matrix M = F.apply(W);
  Matrix FA = M.leftCols(d);
  Vector Fb = M.col(d);

  Eigen::ColPivHouseholderQR<Matrix> qr(FA);
  qr.setThreshold(1e-10);
  if (qr.rank() < d)
    throw SketchRankFailure("sketch_solve: sketched matrix FA is rank deficient");

  LsrReport rep;
  rep.x_hat = qr.solve(Fb);
  rep.sketched_residual = (FA * rep.x_hat - Fb).norm();
  rep.multiplier = F.descriptor();
  rep.k = F.rows();
  if (with_true_residual) {
    rep.true_residual = residual_norm(p, rep.x_hat);
    rep.ratio = residual_ratio(p, rep.x_hat);
  }
  return rep;
}

LsrReport solve_with_retries(const LsrProblem& p, OpPtr base_F,
                             const std::vector<OpPtr>& q_family, int max_retries,
                             double accept_tol, Rng& rng) {
  validate(p);
  const Index m = p.A.rows();
  LsrReport best;
  double best_score = std::numeric_limits<double>::infinity();
  bool have_best = false;

  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    OpPtr F = base_F;
    if (attempt > 0) {
      OpPtr Q = q_family.empty() ? gen_permutation(m, rng)
                                 : q_family[static_cast<size_t>((attempt - 1) %
                                                                static_cast<int>(q_family.size()))];
      F = make_product({base_F, Q});
    }
    LsrReport rep;
    try {
      rep = sketch_solve(p, *F);
    } catch (const SketchRankFailure&) {
      continue;
    }
    rep.attempts = attempt + 1;

    // Validate against an independently drawn sketch of the same shape.
    OpPtr Fv = make_product({base_F, gen_permutation(m, rng)});
    Matrix VA = Fv->apply(p.A);
    Vector vb = Fv->apply(p.b);
    const double r_val = (VA * rep.x_hat - vb).norm();
    const double r_sk = rep.sketched_residual;
    const double score = r_val / std::max(r_sk, 1e-300);
    const bool ok = r_val <= 1e-12 * vb.norm() || score <= accept_tol;
    rep.validated = ok;
    if (ok) return rep;
    if (score < best_score) {
      best_score = score;
      best = rep;
      have_best = true;
    }
  }
  if (!have_best) throw SketchRankFailure("solve_with_retries: all attempts rank deficient");
  best.validated = false;
  return best;
}

}  // namespace slra
