#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slra/linalg.hpp"
#include "slra/oracle.hpp"
#include "slra/rng.hpp"

namespace slra {

/// CUR approximation M ~ C U R with C = M[:, col_set], R = M[row_set, :] and
/// the l x k nucleus U built from the generator block M[row_set, col_set].
struct CurDecomposition {
  IndexSet row_set;  // k selected rows
  IndexSet col_set;  // l selected columns
  Matrix nucleus;    // l x k
  Index r = 0;
  bool qr_nucleus = false;  // cheaper QR-based nucleus instead of the
                            // rank-r truncated pseudo-inverse

  std::string serialize() const;
  static CurDecomposition deserialize(const std::string& text);
};

/// Reconstruction C * U * R against the dense matrix (evaluation only).
Matrix cur_reconstruct(const Matrix& M, const CurDecomposition& c);
double cur_evaluate(const Matrix& M, const CurDecomposition& c, NormKind norm);

/// sqrt((q - s) s h^2 + 1): growth factor of volume-maximizing selection.
double t_factor(Index q, Index s, double h);

/// Locally h-maximal volume row selection for a tall full-rank A (m x r):
/// returns r rows such that every entry of A (A[I,:])^-1 has magnitude <= h.
/// max_swaps = 0 means the default 4r. Throws SelectionFailure on a singular
/// pivot block.
IndexSet maxvol_rows(const Matrix& A, double h = 1.1, Index max_swaps = 0);

/// Row selection of `count` >= A.cols() rows: maxvol on the orthonormal
/// column basis, padded by the largest remaining rows.
IndexSet select_rows_spanning(const Matrix& A, Index count, double h = 1.1);

/// Nucleus from the k x l generator block only; reads exactly k*l entries of
/// M. Throws GeneratorRankFailure when the generator has numerical rank < r.
CurDecomposition primitive_cur(const EntryOracle& M, IndexSet I, IndexSet J,
                               Index r, bool qr_nucleus = false);
CurDecomposition primitive_cur(const Matrix& M, IndexSet I, IndexSet J, Index r,
                               bool qr_nucleus = false);

/// Random p x q sub-block, then a k x l generator inside it located by maxvol
/// on the factors of the sub-block's thin SVD.
CurDecomposition cynical_cur(const EntryOracle& M, Index p, Index q, Index k,
                             Index l, Index r, Rng& rng);

struct CaStep {
  bool horizontal = false;  // horizontal = row-set update
  std::vector<Index> rows, cols;
  double volume_proxy = 0;                  // |det| of the selected square block
  std::optional<double> error_estimate;     // set when stop_tol is active
};

struct CaTrace {
  std::vector<CaStep> steps;
};

/// Cross-approximation: alternate column selection within the current row
/// strip and row selection within the current column strip, reading only the
/// strips. Stops early when the sampled error estimate falls below stop_tol.
std::pair<CurDecomposition, CaTrace> cross_approx(
    const EntryOracle& M, Index r, Index k, Index l, IndexSet init_rows,
    int loops, double h, std::optional<double> stop_tol, Rng& rng);

/// Rank-r top SVD of the product A W B via QR of the outer factors and an
/// SVD of the small core.
Svd lra_to_top_svd(const Matrix& A, const Matrix& W, const Matrix& B, Index r);
Svd lra_to_top_svd(const LowRankFactors& f, Index r);

enum class CurSelector { Deterministic, Sampled };

/// Index sets from maxvol (or norm-square sampling) on the singular factors;
/// nucleus chosen so that C U R reproduces S Sigma T* exactly.
CurDecomposition top_svd_to_cur(const Svd& f, Index k, Index l, double h,
                                CurSelector selector, Rng& rng);

}  // namespace slra
