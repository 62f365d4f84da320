#pragma once

#include <optional>
#include <vector>

#include "slra/cur.hpp"
#include "slra/linalg.hpp"
#include "slra/oracle.hpp"
#include "slra/rng.hpp"

namespace slra {

/// Column sampling distribution derived from the top-r right singular
/// factor: p_j >= (beta/r) ||t_j||^2, sum p_j = 1.
struct LeverageScores {
  Vector p;
  double beta = 1.0;
  Index r = 0;
};

/// Sampled column indices (possibly with repeats) and the aligned positive
/// rescaling weights.
struct SampleRescale {
  std::vector<Index> indices;
  Vector d;
};

/// Exact formula p_j = ||t_j||^2 / r for an orthonormal n x r factor. A
/// beta < 1 only relaxes the validity check, not the distribution.
LeverageScores svd_leverage_scores(const Matrix& T_r, double beta = 1.0);

/// l i.i.d. categorical draws, d_t = 1 / sqrt(l p_{i_t}). Repeats kept.
SampleRescale sample_exactly(const LeverageScores& scores, Index l, Rng& rng);

/// Bernoulli inclusion with probability min(1, l p_j) and weight
/// 1 / min(1, sqrt(l p_j)). Throws EmptySample when nothing is kept.
SampleRescale sample_expected(const LeverageScores& scores, Index l, Rng& rng);

/// Merge repeated indices, accumulating squared weights (preserves the
/// sampled Gram matrix); result has distinct indices.
SampleRescale collapse_duplicates(const SampleRescale& s);

enum class SampleMode { Exactly, Expected };

/// CUR by leverage-score sampling: sample l columns by the column scores,
/// re-derive row scores from the rescaled column factor, sample k rows, and
/// build the doubly rescaled nucleus. `scores` skips the dense stage-1 SVD
/// (the superfast path). plain_nucleus switches to the unrescaled
/// pseudo-inverse of the generator.
CurDecomposition cur_via_leverage(const EntryOracle& M, Index r, Index k, Index l,
                                  double beta, double beta_bar, SampleMode mode,
                                  const std::optional<LeverageScores>& scores,
                                  Rng& rng, bool plain_nucleus = false);

/// Scores from the superfast top SVD of a crude LRA, then cur_via_leverage.
CurDecomposition refine_lra(const EntryOracle& M, const LowRankFactors& crude,
                            Index r, Index k, Index l, Rng& rng);

LeverageScores uniform_scores(Index n);

/// max_j | p_j(G) - ||g_j||^2 / (n r) | for an r x n matrix G: how far the
/// true scores sit from the cheap column-norm surrogate.
double gaussian_score_gap(const Matrix& G);

/// Sufficient sample sizes of the accuracy guarantees (evaluators only).
double sample_bound_quadratic(Index r, double eps, double beta);             // 3200 r^2/(eps^2 beta)
double sample_bound_loglinear(Index r, double eps, double beta, double cbar); // cbar r ln(r)/(eps^2 beta)

/// Deviation sqrt(4 r ln(2r/delta) / l) of sampled singular values.
double epsilon_for_sample(Index r, Index l, double delta);

}  // namespace slra
