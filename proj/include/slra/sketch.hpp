#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "slra/linalg.hpp"
#include "slra/matrix.hpp"
#include "slra/rng.hpp"

namespace slra {

enum class Side { Left, Right };
enum class ColumnMode { Leftmost, Random };

/// Thread-local arithmetic tally incremented by operator applications, used
/// by tests to assert the per-kind flop budgets.
struct OpCount {
  unsigned long long adds = 0;
  unsigned long long muls = 0;
  unsigned long long total() const { return adds + muls; }
};
OpCount& op_counter();
inline void reset_op_counter() { op_counter() = OpCount{}; }

/// Structured linear operator applied without materialization. `apply` is
/// op * M; the right-side product M * op goes through the transpose path.
class SketchOperator {
public:
  virtual ~SketchOperator() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  virtual bool is_complex() const { return false; }
  virtual std::string kind() const = 0;
  virtual nlohmann::json descriptor() const = 0;

  virtual Matrix apply(const Matrix& M) const = 0;             // op * M
  virtual Matrix apply_transpose(const Matrix& M) const = 0;   // op^T * M
  virtual CMatrix apply_complex(const CMatrix& M) const;
  virtual CMatrix apply_transpose_complex(const CMatrix& M) const;
};

using OpPtr = std::shared_ptr<const SketchOperator>;

// ---- deterministic constructors -------------------------------------------

/// (P x)_i = x_{sigma[i]}.
OpPtr make_permutation(std::vector<Index> sigma);
OpPtr make_sign_diagonal(Vector d);
OpPtr make_abridged_hadamard(Index n, int d);
OpPtr make_abridged_fourier(Index n, int d);
/// f-circulant with sparse first column: nonzeros = (position, value) list.
OpPtr make_sparse_circulant(Index n, double f, std::vector<std::pair<Index, double>> nonzeros);
/// Inverse of the unit bidiagonal with subdiagonal entries -b(i); `subdiag`
/// holds b_2..b_n (length n-1). Application solves the bidiagonal system.
OpPtr make_inverse_bidiagonal(Vector subdiag, bool lower = true);
OpPtr make_householder_chain(std::vector<Vector> reflectors,
                             std::vector<std::vector<Index>> perms);
OpPtr make_gaussian(Matrix G);
/// k x total row-selection operator: (op M) keeps the selected rows.
OpPtr make_sub_identity(IndexSet selected, Index total);
OpPtr make_sum(std::vector<OpPtr> ops, std::vector<int> signs);
OpPtr make_product(std::vector<OpPtr> ops);
OpPtr take_columns(OpPtr op, IndexSet columns);
OpPtr take_columns(OpPtr op, Index l, ColumnMode mode, Rng& rng);

// ---- randomized generators ------------------------------------------------

OpPtr gen_permutation(Index n, Rng& rng);
OpPtr gen_sign_diagonal(Index n, Rng& rng);
/// Diagonal drawn uniformly from {+-1, +-2, +-3, +-4} (well-conditioned,
/// nonsingular scaling used by some benchmark configurations).
OpPtr gen_scaled_diagonal(Index n, Rng& rng);
OpPtr gen_sparse_circulant(Index n, Index s, Rng& rng);
OpPtr gen_inverse_bidiagonal(Index n, Rng& rng);
OpPtr gen_householder_chain(Index n, Index q, Rng& rng);
OpPtr gen_gaussian(Index rows, Index cols, Rng& rng);
/// P * H_{n,d} and P * D * H_{n,d}.
OpPtr gen_aph(Index n, int d, Rng& rng);
OpPtr gen_asph(Index n, int d, Rng& rng, bool scaled_diag = false);

// ---- application helpers --------------------------------------------------

Matrix apply(const SketchOperator& op, const Matrix& M, Side side);
Matrix materialize(const SketchOperator& op, Index cap = 4096);
CMatrix materialize_complex(const SketchOperator& op, Index cap = 4096);

// ---- bidiagonal-product pseudo-Gaussian generator -------------------------

/// Unit lower bidiagonal factor with +-1 subdiagonal and +-1 wraparound
/// corner; `signs` has length n: signs[0] is the (0, n-1) corner, signs[i]
/// the (i, i-1) entry.
Matrix bidiagonal_factor(Index n, const std::vector<int>& signs);

/// Product of T factors (each followed by a random column permutation),
/// optionally standardized columnwise to zero mean / unit variance.
Matrix gen_bidiagonal_product(Index n, Index T, Rng& rng, bool standardize = true);

/// Single raw (unstandardized) column j of the product, at O(T n) cost.
Vector bidiagonal_product_column(Index n, Index T, Index j, Rng& rng);

struct KsResult {
  double statistic = 0;
  bool pass = false;
};
/// One-sample Kolmogorov-Smirnov test of the standardized sample against the
/// standard normal CDF; pass iff statistic < 1.36/sqrt(size).
KsResult ks_normality(const std::vector<double>& sample);

}  // namespace slra
