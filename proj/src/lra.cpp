#include "slra/lra.hpp"

#include <cmath>
#include <stdexcept>

#include "slra/errors.hpp"

namespace slra {

namespace {

// Basis factor of M H per the chosen variant, with the rank check shared by
// both entry points.
Matrix range_basis(const Matrix& M, const SketchOperator& H, Index r,
                   RangeVariant variant) {
  if (H.rows() != M.cols()) throw std::invalid_argument("range_finder: H rows != n");
  const Index l = H.cols();
  if (r < 1 || r > l) throw std::invalid_argument("range_finder: need 1 <= r <= l");

  Matrix MH = apply(H, M, Side::Right);  // m x l
  if (numerical_rank(MH, 1e-10, RankMode::Relative) < r)
    throw RangeFailure("range_finder: sketch M H has numerical rank below target");

  if (variant == RangeVariant::BasisQr) return thin_qr(MH).first;
  Svd f = svd(MH);
  return f.S.leftCols(r) * f.sigma.head(r).asDiagonal();
}

}  // namespace

LowRankFactors range_finder(const Matrix& M, const SketchOperator& H, Index r,
                            RangeVariant variant) {
  LowRankFactors out;
  out.U = range_basis(M, H, r, variant);
  out.V = (variant == RangeVariant::BasisQr) ? Matrix(out.U.transpose() * M)
                                             : Matrix(pseudo_inverse(out.U) * M);
  out.target_rank = r;
  return out;
}

LowRankFactors lra_premult(const Matrix& M, const SketchOperator& F,
                           const SketchOperator& H, Index r, RangeVariant variant) {
  if (F.cols() != M.rows()) throw std::invalid_argument("lra_premult: F cols != m");
  LowRankFactors out;
  out.U = range_basis(M, H, r, variant);
  Matrix FU = F.apply(out.U);
  if (numerical_rank(FU, 1e-10, RankMode::Relative) < r)
    throw PremultRankFailure("lra_premult: F U has numerical rank below target");
  out.V = pseudo_inverse(FU) * F.apply(M);
  out.target_rank = r;
  return out;
}

LowRankFactors two_stage_truncate(const LowRankFactors& f, Index r) {
  if (r < 1 || r > f.l()) throw std::invalid_argument("two_stage_truncate: need 1 <= r <= l");
  auto [Q, R] = thin_qr(f.U);
  Svd core = svd(Matrix(R * f.V));  // l x n, cheap when l << m
  LowRankFactors out;
  out.U = Q * core.S.leftCols(r) * core.sigma.head(r).asDiagonal();
  out.V = core.T.leftCols(r).transpose();
  out.target_rank = r;
  return out;
}

std::pair<double, double> deterministic_error_diagnostic(const Matrix& M,
                                                         const SketchOperator& H,
                                                         Index r) {
  if (M.rows() > 512 || M.cols() > 512)
    throw std::invalid_argument("deterministic_error_diagnostic: dense cap 512 exceeded");
  if (H.rows() != M.cols()) throw std::invalid_argument("diagnostic: H rows != n");
  const Index n = M.cols();
  if (r < 1 || r >= n) throw std::invalid_argument("diagnostic: need 1 <= r < n");

  Svd f = svd(M);
  Matrix C1 = apply(H, Matrix(f.T.leftCols(r).transpose()), Side::Right);      // r x l
  Matrix C2 = apply(H, Matrix(f.T.rightCols(n - r).transpose()), Side::Right); // (n-r) x l
  const Vector tail = f.sigma.tail(n - r);
  const double head = tail(0);  // ||Sigma_2||
  const double cross = spectral_norm(Matrix(tail.asDiagonal() * C2 * pseudo_inverse(C1)));
  const double bound = std::sqrt(head * head + cross * cross);

  // the split at r analyses the rank-r approximation, so measure that variant
  LowRankFactors lr = range_finder(M, H, r, RangeVariant::TruncatedRankR);
  const double achieved = spectral_norm(M - lr.product());
  return {bound, achieved};
}

LraErrorEstimate posterior_error_estimate(const EntryOracle& M,
                                          const LowRankFactors& f, Index q,
                                          Index s, Rng& rng) {
  const Index m = M.rows(), n = M.cols();
  if (f.U.rows() != m || f.V.cols() != n)
    throw std::invalid_argument("posterior_error_estimate: factor shape mismatch");
  if (q < 1 || q > m || s < 1 || s > n || q * s < 2)
    throw std::invalid_argument("posterior_error_estimate: bad sample sizes");

  const IndexSet I(rng.distinct_indices(q, m), m);
  const IndexSet J(rng.distinct_indices(s, n), n);
  double sumsq = 0;
  for (Index a = 0; a < q; ++a)
    for (Index b = 0; b < s; ++b) {
      const double e = M.entry(I[a], J[b]) - f.U.row(I[a]).dot(f.V.col(J[b]));
      sumsq += e * e;
    }
  const double k = static_cast<double>(q * s);
  const double mean_sq = sumsq / k;
  const double scale = static_cast<double>(m) * static_cast<double>(n);

  LraErrorEstimate est;
  est.estimate_frobenius = std::sqrt(scale * mean_sq);
  est.sample_rows = q;
  est.sample_cols = s;
  if (q * s >= 100) {
    // Wilson-Hilferty chi-square quantiles for the variance interval.
    auto chi2 = [k](double z) {
      const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
      return k * t * t * t;
    };
    const double z975 = 1.959963984540054;
    est.ci_lo = std::sqrt(scale * sumsq / chi2(z975));
    est.ci_hi = std::sqrt(scale * sumsq / chi2(-z975));
    est.has_interval = true;
  } else {
    est.ci_lo = est.ci_hi = est.estimate_frobenius;
  }
  return est;
}

LraErrorEstimate posterior_error_estimate(const Matrix& M, const LowRankFactors& f,
                                          Index q, Index s, Rng& rng) {
  DenseOracle o(M);
  return posterior_error_estimate(o, f, q, s, rng);
}

}  // namespace slra
