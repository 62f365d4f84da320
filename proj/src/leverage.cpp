#include "slra/leverage.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "slra/errors.hpp"

namespace slra {

LeverageScores svd_leverage_scores(const Matrix& T_r, double beta) {
  const Index n = T_r.rows(), r = T_r.cols();
  if (r < 1 || n < r) throw std::invalid_argument("svd_leverage_scores: bad shape");
  if (beta <= 0 || beta > 1) throw std::invalid_argument("svd_leverage_scores: beta in (0,1]");
  if (spectral_norm(Matrix(T_r.transpose() * T_r - Matrix::Identity(r, r))) > 1e-8)
    throw std::invalid_argument("svd_leverage_scores: columns not orthonormal");
  LeverageScores s;
  s.p = T_r.rowwise().squaredNorm() / static_cast<double>(r);
  s.beta = beta;
  s.r = r;
  return s;
}

SampleRescale sample_exactly(const LeverageScores& scores, Index l, Rng& rng) {
  if (l < 1) throw std::invalid_argument("sample_exactly: l >= 1");
  const Index n = scores.p.size();
  SampleRescale out;
  out.indices.reserve(static_cast<size_t>(l));
  out.d = Vector(l);
  for (Index t = 0; t < l; ++t) {
    double u = rng.uniform() * scores.p.sum();
    Index i = 0;
    while (i + 1 < n && u > scores.p(i)) u -= scores.p(i), ++i;
    while (i > 0 && scores.p(i) <= 0) --i;  // zero-probability categories excluded
    out.indices.push_back(i);
    out.d(t) = 1.0 / std::sqrt(static_cast<double>(l) * scores.p(i));
  }
  return out;
}

SampleRescale sample_expected(const LeverageScores& scores, Index l, Rng& rng) {
  if (l < 1) throw std::invalid_argument("sample_expected: l >= 1");
  const Index n = scores.p.size();
  SampleRescale out;
  std::vector<double> w;
  for (Index j = 0; j < n; ++j) {
    const double q = std::min(1.0, static_cast<double>(l) * scores.p(j));
    if (q > 0 && rng.uniform() < q) {
      out.indices.push_back(j);
      w.push_back(1.0 / std::min(1.0, std::sqrt(static_cast<double>(l) * scores.p(j))));
    }
  }
  if (out.indices.empty()) throw EmptySample("sample_expected: no columns kept");
  out.d = Eigen::Map<const Vector>(w.data(), static_cast<Index>(w.size()));
  return out;
}

SampleRescale collapse_duplicates(const SampleRescale& s) {
  std::map<Index, double> acc;  // index -> accumulated squared weight
  for (size_t t = 0; t < s.indices.size(); ++t)
    acc[s.indices[t]] += s.d(static_cast<Index>(t)) * s.d(static_cast<Index>(t));
  SampleRescale out;
  out.d = Vector(static_cast<Index>(acc.size()));
  Index t = 0;
  for (const auto& [i, w2] : acc) {
    out.indices.push_back(i);
    out.d(t++) = std::sqrt(w2);
  }
  return out;
}

namespace {

SampleRescale draw(const LeverageScores& scores, Index l, SampleMode mode, Rng& rng) {
  if (mode == SampleMode::Exactly) return sample_exactly(scores, l, rng);
  for (int attempt = 0; attempt < 8; ++attempt) {
    try {
      return sample_expected(scores, l, rng);
    } catch (const EmptySample&) {
    }
  }
  throw EmptySample("cur_via_leverage: expected-mode sampling stayed empty after 8 tries");
}

}  // namespace

CurDecomposition cur_via_leverage(const EntryOracle& M, Index r, Index k, Index l,
                                  double beta, double beta_bar, SampleMode mode,
                                  const std::optional<LeverageScores>& scores,
                                  Rng& rng, bool plain_nucleus) {
  const Index m = M.rows(), n = M.cols();
  if (r < 1 || k < r || l < r) throw std::invalid_argument("cur_via_leverage: need k, l >= r");

  LeverageScores col_scores;
  if (scores) {
    col_scores = *scores;
    if (col_scores.p.size() != n)
      throw std::invalid_argument("cur_via_leverage: scores length != n");
  } else {
    Svd f = svd(M.dense());
    if (f.sigma(0) <= 0 || f.sigma(r - 1) <= 1e-10 * f.sigma(0))
      throw GeneratorRankFailure("cur_via_leverage: input rank below target");
    col_scores = svd_leverage_scores(f.T.leftCols(r), beta);
  }

  // columns, then rescaled column factor, then rows
  SampleRescale cs = collapse_duplicates(draw(col_scores, l, mode, rng));
  IndexSet J(cs.indices, n);
  Matrix CD = M.cols_of(J) * cs.d.asDiagonal();

  Svd cf = svd(CD);
  if (cf.sigma(0) <= 0 || cf.sigma(r - 1) <= 1e-10 * cf.sigma(0))
    throw GeneratorRankFailure("cur_via_leverage: sampled column factor rank below target");
  LeverageScores row_scores = svd_leverage_scores(cf.S.leftCols(r), beta_bar);

  SampleRescale rs = collapse_duplicates(draw(row_scores, k, mode, rng));
  IndexSet I(rs.indices, m);

  Matrix G = M.block(I, J);
  CurDecomposition c;
  c.r = r;
  if (plain_nucleus) {
    Svd g = svd(G);
    if (g.sigma(0) <= 0 || g.sigma(r - 1) <= 1e-10 * g.sigma(0))
      throw GeneratorRankFailure("cur_via_leverage: generator rank below target");
    c.nucleus = g.T.leftCols(r) * g.sigma.head(r).cwiseInverse().asDiagonal() *
                g.S.leftCols(r).transpose();
  } else {
    Matrix core = rs.d.asDiagonal() * G * cs.d.asDiagonal();
    Svd g = svd(core);
    if (g.sigma(0) <= 0 || g.sigma(r - 1) <= 1e-10 * g.sigma(0))
      throw GeneratorRankFailure("cur_via_leverage: rescaled generator rank below target");
    Matrix core_pinv = g.T.leftCols(r) * g.sigma.head(r).cwiseInverse().asDiagonal() *
                       g.S.leftCols(r).transpose();
    c.nucleus = cs.d.asDiagonal() * core_pinv * rs.d.asDiagonal();
  }
  c.row_set = std::move(I);
  c.col_set = std::move(J);
  return c;
}

CurDecomposition refine_lra(const EntryOracle& M, const LowRankFactors& crude,
                            Index r, Index k, Index l, Rng& rng) {
  if (crude.target_rank < r) throw std::invalid_argument("refine_lra: crude rank below target");
  Svd top = lra_to_top_svd(crude, r);
  LeverageScores scores = svd_leverage_scores(top.T, 1.0);
  return cur_via_leverage(M, r, k, l, 1.0, 1.0, SampleMode::Exactly, scores, rng);
}

LeverageScores uniform_scores(Index n) {
  if (n < 1) throw std::invalid_argument("uniform_scores: n >= 1");
  LeverageScores s;
  s.p = Vector::Constant(n, 1.0 / static_cast<double>(n));
  s.beta = 1.0;
  s.r = 1;
  return s;
}

double gaussian_score_gap(const Matrix& G) {
  const Index r = G.rows(), n = G.cols();
  if (r > n) throw std::invalid_argument("gaussian_score_gap: need r <= n");
  Svd f = svd(Matrix(G / std::sqrt(static_cast<double>(n))));
  const Vector p = f.T.leftCols(r).rowwise().squaredNorm() / static_cast<double>(r);
  double gap = 0;
  for (Index j = 0; j < n; ++j) {
    const double surrogate =
        G.col(j).squaredNorm() / (static_cast<double>(n) * static_cast<double>(r));
    gap = std::max(gap, std::abs(p(j) - surrogate));
  }
  return gap;
}

double sample_bound_quadratic(Index r, double eps, double beta) {
  return 3200.0 * static_cast<double>(r) * static_cast<double>(r) / (eps * eps * beta);
}

double sample_bound_loglinear(Index r, double eps, double beta, double cbar) {
  return cbar * static_cast<double>(r) * std::log(static_cast<double>(r)) / (eps * eps * beta);
}

double epsilon_for_sample(Index r, Index l, double delta) {
  return std::sqrt(4.0 * static_cast<double>(r) *
                   std::log(2.0 * static_cast<double>(r) / delta) /
                   static_cast<double>(l));
}

}  // namespace slra
