#pragma once

#include <utility>

#include "slra/linalg.hpp"
#include "slra/oracle.hpp"
#include "slra/sketch.hpp"

namespace slra {

/// Basis choice for the range finder: an orthonormal basis of the whole
/// sketch M H (thin QR), or the rank-r truncation of M H.
enum class RangeVariant { BasisQr, TruncatedRankR };

/// U spans (part of) the range of M H, V = U^+ M. Throws RangeFailure when
/// the sketch M H has numerical rank below r.
LowRankFactors range_finder(const Matrix& M, const SketchOperator& H, Index r,
                            RangeVariant variant = RangeVariant::BasisQr);

/// Pre-multiplied variant: U as in range_finder, V = (F U)^+ (F M), so M is
/// touched only through the two sketches F M and M H. Throws
/// PremultRankFailure when F U has numerical rank below r.
LowRankFactors lra_premult(const Matrix& M, const SketchOperator& F,
                           const SketchOperator& H, Index r,
                           RangeVariant variant = RangeVariant::BasisQr);

/// Rank-r truncation of the product U V without ever forming it densely
/// (QR of U, small SVD of R V).
LowRankFactors two_stage_truncate(const LowRankFactors& f, Index r);

/// Deterministic diagnostic: (bound, achieved) where bound comes from the
/// SVD tail of M split against the sketch directions, and achieved is the
/// spectral error of the QR-basis range finder with the same H. Dense-only
/// (dimension cap 512).
std::pair<double, double> deterministic_error_diagnostic(const Matrix& M,
                                                         const SketchOperator& H,
                                                         Index r);

struct LraErrorEstimate {
  double estimate_frobenius = 0;
  Index sample_rows = 0, sample_cols = 0;
  double ci_lo = 0, ci_hi = 0;  // 95% interval; collapsed to the point
                                // estimate when fewer than 100 samples
  bool has_interval = false;
};

/// Frobenius-error estimate of M - U V from a random q x s sample grid,
/// reading exactly q*s entries of M. The chi-square variance interval is
/// reported when q*s >= 100.
LraErrorEstimate posterior_error_estimate(const EntryOracle& M,
                                          const LowRankFactors& f, Index q,
                                          Index s, Rng& rng);
LraErrorEstimate posterior_error_estimate(const Matrix& M, const LowRankFactors& f,
                                          Index q, Index s, Rng& rng);

}  // namespace slra
