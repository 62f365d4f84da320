#include "slra/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace slra {

OpCount& op_counter() {
  thread_local OpCount counter;
  return counter;
}

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

CMatrix lift(const Matrix& M) { return M.cast<std::complex<double>>(); }

}  // namespace

CMatrix SketchOperator::apply_complex(const CMatrix& M) const {
  // Real operator on a complex matrix: act on real and imaginary parts.
  Matrix re = apply(M.real()), im = apply(M.imag());
  return re.cast<std::complex<double>>() +
         std::complex<double>(0, 1) * im.cast<std::complex<double>>();
}

CMatrix SketchOperator::apply_transpose_complex(const CMatrix& M) const {
  Matrix re = apply_transpose(M.real()), im = apply_transpose(M.imag());
  return re.cast<std::complex<double>>() +
         std::complex<double>(0, 1) * im.cast<std::complex<double>>();
}

// ---------------------------------------------------------------- Permutation

namespace {

class PermutationOp final : public SketchOperator {
public:
  explicit PermutationOp(std::vector<Index> sigma) : sigma_(std::move(sigma)) {
    IndexSet check(sigma_, static_cast<Index>(sigma_.size()));  // validates
  }
  Index rows() const override { return static_cast<Index>(sigma_.size()); }
  Index cols() const override { return rows(); }
  std::string kind() const override { return "permutation"; }
  nlohmann::json descriptor() const override {
    return {{"kind", kind()}, {"sigma", sigma_}};
  }
  Matrix apply(const Matrix& M) const override {
    require(M.rows() == cols(), "permutation apply: dims");
    Matrix out(rows(), M.cols());
    for (Index i = 0; i < rows(); ++i) out.row(i) = M.row(sigma_[static_cast<size_t>(i)]);
    return out;
  }
  Matrix apply_transpose(const Matrix& M) const override {
    require(M.rows() == rows(), "permutation apply: dims");
    Matrix out(cols(), M.cols());
    for (Index i = 0; i < rows(); ++i) out.row(sigma_[static_cast<size_t>(i)]) = M.row(i);
    return out;
  }

private:
  std::vector<Index> sigma_;
};

// ---------------------------------------------------------------- Diagonal

class SignDiagonalOp final : public SketchOperator {
public:
  explicit SignDiagonalOp(Vector d) : d_(std::move(d)) {
    for (Index i = 0; i < d_.size(); ++i)
      require(std::abs(d_(i)) > 1e-12, "sign diagonal: entry too close to 0");
  }
  Index rows() const override { return d_.size(); }
  Index cols() const override { return d_.size(); }
  std::string kind() const override { return "sign_diagonal"; }
  nlohmann::json descriptor() const override {
    return {{"kind", kind()}, {"d", std::vector<double>(d_.data(), d_.data() + d_.size())}};
  }
  Matrix apply(const Matrix& M) const override {
    require(M.rows() == d_.size(), "diagonal apply: dims");
    op_counter().muls += static_cast<unsigned long long>(M.size());
    return d_.asDiagonal() * M;
  }
  Matrix apply_transpose(const Matrix& M) const override { return apply(M); }

private:
  Vector d_;
};

// ---------------------------------------------------------------- Abridged Hadamard

void ah_recurse(Eigen::Ref<Matrix> X, int depth) {
  if (depth == 0) return;
  op_counter().adds += static_cast<unsigned long long>(X.size());
  const Index s = X.rows() / 2;
  Matrix a = X.topRows(s);
  X.topRows(s) += X.bottomRows(s);
  X.bottomRows(s) = a - X.bottomRows(s);
  ah_recurse(X.topRows(s), depth - 1);
  ah_recurse(X.bottomRows(s), depth - 1);
}

class AbridgedHadamardOp final : public SketchOperator {
public:
  AbridgedHadamardOp(Index n, int d) : n_(n), d_(d) {
    require(d >= 1, "abridged hadamard: depth >= 1");
    require(n % (Index(1) << d) == 0, "abridged hadamard: 2^d must divide n");
  }
  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  std::string kind() const override { return "abridged_hadamard"; }
  nlohmann::json descriptor() const override {
    return {{"kind", kind()}, {"n", n_}, {"d", d_}};
  }
  Matrix apply(const Matrix& M) const override {
    require(M.rows() == n_, "AH apply: dims");
    Matrix X = M;
    ah_recurse(X, d_);
    return X;
  }
  // H_{n,d} is symmetric (each recursion level preserves symmetry).
  Matrix apply_transpose(const Matrix& M) const override { return apply(M); }

private:
  Index n_;
  int d_;
};

// ---------------------------------------------------------------- Abridged Fourier

void af_recurse(CMatrix& X, int depth) {
  if (depth == 0) return;
  const Index s = X.rows() / 2;
  const Index c = X.cols();
  op_counter().adds += static_cast<unsigned long long>(X.size());
  op_counter().muls += static_cast<unsigned long long>(s * c);
  CMatrix u = X.topRows(s) + X.bottomRows(s);
  CMatrix w = X.topRows(s) - X.bottomRows(s);
  const double theta = 2.0 * std::numbers::pi / static_cast<double>(2 * s);
  for (Index i = 0; i < s; ++i)
    w.row(i) *= std::exp(std::complex<double>(0, theta * static_cast<double>(i)));
  af_recurse(u, depth - 1);
  af_recurse(w, depth - 1);
  for (Index i = 0; i < s; ++i) {
    X.row(2 * i) = u.row(i);
    X.row(2 * i + 1) = w.row(i);
  }
}

void af_recurse_transpose(CMatrix& X, int depth) {
  if (depth == 0) return;
  const Index s = X.rows() / 2;
  const Index c = X.cols();
  CMatrix u(s, c), w(s, c);
  for (Index i = 0; i < s; ++i) {
    u.row(i) = X.row(2 * i);
    w.row(i) = X.row(2 * i + 1);
  }
  af_recurse_transpose(u, depth - 1);
  af_recurse_transpose(w, depth - 1);
  op_counter().adds += static_cast<unsigned long long>(X.size());
  op_counter().muls += static_cast<unsigned long long>(s * c);
  const double theta = 2.0 * std::numbers::pi / static_cast<double>(2 * s);
  for (Index i = 0; i < s; ++i)
    w.row(i) *= std::exp(std::complex<double>(0, theta * static_cast<double>(i)));
  X.topRows(s) = u + w;
  X.bottomRows(s) = u - w;
}

class AbridgedFourierOp final : public SketchOperator {
public:
  AbridgedFourierOp(Index n, int d) : n_(n), d_(d) {
    require(d >= 1, "abridged fourier: depth >= 1");
    require(n % (Index(1) << d) == 0, "abridged fourier: 2^d must divide n");
  }
  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  bool is_complex() const override { return true; }
  std::string kind() const override { return "abridged_fourier"; }
  nlohmann::json descriptor() const override {
    return {{"kind", kind()}, {"n", n_}, {"d", d_}};
  }
  Matrix apply(const Matrix&) const override {
    throw std::logic_error("abridged fourier is complex; use apply_complex");
  }
  Matrix apply_transpose(const Matrix&) const override {
    throw std::logic_error("abridged fourier is complex; use apply_transpose_complex");
  }
  CMatrix apply_complex(const CMatrix& M) const override {
    require(M.rows() == n_, "AF apply: dims");
    CMatrix X = M;
    af_recurse(X, d_);
    return X;
  }
  CMatrix apply_transpose_complex(const CMatrix& M) const override {
    require(M.rows() == n_, "AF apply: dims");
    CMatrix X = M;
    af_recurse_transpose(X, d_);
    return X;
  }

private:
  Index n_;
  int d_;
};

// ---------------------------------------------------------------- Sparse circulant

class SparseCirculantOp final : public SketchOperator {
public:
  SparseCirculantOp(Index n, double f, std::vector<std::pair<Index, double>> nz)
      : n_(n), f_(f), nz_(std::move(nz)) {
    require(!nz_.empty() && static_cast<Index>(nz_.size()) <= n, "sparse circulant: 1 <= s <= n");
    for (auto& [k, v] : nz_) {
      require(k >= 0 && k < n, "sparse circulant: position out of range");
      require(v != 0.0, "sparse circulant: zero value");
    }
    all_unit_ = std::abs(std::abs(f_) - 1.0) < 1e-15 &&
                std::all_of(nz_.begin(), nz_.end(),
                            [](const auto& p) { return std::abs(p.second) == 1.0; });
  }
  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  std::string kind() const override { return "sparse_circulant"; }
  nlohmann::json descriptor() const override {
    nlohmann::json pos = nlohmann::json::array(), val = nlohmann::json::array();
    for (auto& [k, v] : nz_) {
      pos.push_back(k);
      val.push_back(v);
    }
    return {{"kind", kind()}, {"n", n_}, {"f", f_}, {"positions", pos}, {"values", val}};
  }
  Matrix apply(const Matrix& M) const override {
    require(M.rows() == n_, "sparse circulant apply: dims");
    const auto s = static_cast<unsigned long long>(nz_.size());
    const auto sz = static_cast<unsigned long long>(M.size());
    if (all_unit_) {
      op_counter().adds += s * sz;
    } else {
      op_counter().muls += s * sz;
      op_counter().adds += (s - 1) * sz;
    }
    Matrix out = Matrix::Zero(n_, M.cols());
    for (const auto& [k, v] : nz_) {
      // (Z_f^k x)_i = x_{i-k} for i >= k, f * x_{n+i-k} otherwise.
      if (k > 0) out.bottomRows(n_ - k) += v * M.topRows(n_ - k);
      out.topRows(k) += (v * f_) * M.bottomRows(k);
      if (k == 0) out += v * M;
    }
    return out;
  }
  Matrix apply_transpose(const Matrix& M) const override {
    require(M.rows() == n_, "sparse circulant apply: dims");
    const auto s = static_cast<unsigned long long>(nz_.size());
    const auto sz = static_cast<unsigned long long>(M.size());
    if (all_unit_) {
      op_counter().adds += s * sz;
    } else {
      op_counter().muls += s * sz;
      op_counter().adds += (s - 1) * sz;
    }
    Matrix out = Matrix::Zero(n_, M.cols());
    for (const auto& [k, v] : nz_) {
      if (k > 0) out.topRows(n_ - k) += v * M.bottomRows(n_ - k);
      out.bottomRows(k) += (v * f_) * M.topRows(k);
      if (k == 0) out += v * M;
    }
    return out;
  }

private:
  Index n_;
  double f_;
  std::vector<std::pair<Index, double>> nz_;
  bool all_unit_ = false;
};

// ---------------------------------------------------------------- Inverse bidiagonal

class InverseBidiagonalOp final : public SketchOperator {
public:
  InverseBidiagonalOp(Vector subdiag, bool lower)
      : b_(std::move(subdiag)), lower_(lower) {}
  Index rows() const override { return b_.size() + 1; }
  Index cols() const override { return rows(); }
  std::string kind() const override { return "inverse_bidiagonal"; }
  nlohmann::json descriptor() const override {
    return {{"kind", kind()},
            {"subdiag", std::vector<double>(b_.data(), b_.data() + b_.size())},
            {"lower", lower_}};
  }
  // Solve (I + DZ) x = v per column: x_1 = v_1, x_i = v_i + b_i x_{i-1}
  // (the stored signs are the negated subdiagonal of the bidiagonal matrix,
  // matching its inverse's first subdiagonal).
  Matrix apply(const Matrix& M) const override {
    require(M.rows() == rows(), "inverse bidiagonal apply: dims");
    const auto nm1 = static_cast<unsigned long long>(b_.size());
    op_counter().adds += nm1 * static_cast<unsigned long long>(M.cols());
    op_counter().muls += nm1 * static_cast<unsigned long long>(M.cols());
    Matrix out = M;
    if (lower_) {
      for (Index i = 1; i < rows(); ++i) out.row(i) += b_(i - 1) * out.row(i - 1);
    } else {
      for (Index i = rows() - 2; i >= 0; --i) out.row(i) += b_(i) * out.row(i + 1);
    }
    return out;
  }
  Matrix apply_transpose(const Matrix& M) const override {
    require(M.rows() == rows(), "inverse bidiagonal apply: dims");
    const auto nm1 = static_cast<unsigned long long>(b_.size());
    op_counter().adds += nm1 * static_cast<unsigned long long>(M.cols());
    op_counter().muls += nm1 * static_cast<unsigned long long>(M.cols());
    Matrix out = M;
    if (lower_) {
      for (Index i = rows() - 2; i >= 0; --i) out.row(i) += b_(i) * out.row(i + 1);
    } else {
      for (Index i = 1; i < rows(); ++i) out.row(i) += b_(i - 1) * out.row(i - 1);
    }
    return out;
  }

private:
  Vector b_;
  bool lower_;
};

// ---------------------------------------------------------------- Householder chain

class HouseholderChainOp final : public SketchOperator {
public:
  HouseholderChainOp(std::vector<Vector> w, std::vector<std::vector<Index>> perms)
      : w_(std::move(w)), perms_(std::move(perms)) {
    require(!w_.empty() && w_.size() == perms_.size(), "householder chain: size mismatch");
    n_ = w_[0].size();
    for (auto& v : w_) require(v.size() == n_ && v.norm() > 0, "householder chain: bad reflector");
    for (auto& p : perms_) IndexSet(p, n_);  // validates
  }
  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  std::string kind() const override { return "householder_chain"; }
  nlohmann::json descriptor() const override {
    return {{"kind", kind()}, {"n", n_}, {"q", w_.size()}};
  }
  // op = P_1 R_1 P_2 R_2 ... P_q R_q with R_i = I - 2 w w^T / (w^T w).
  Matrix apply(const Matrix& M) const override {
    require(M.rows() == n_, "householder chain apply: dims");
    Matrix X = M;
    for (size_t t = w_.size(); t-- > 0;) {
      reflect(w_[t], X);
      Matrix Y(n_, X.cols());
      for (Index i = 0; i < n_; ++i) Y.row(i) = X.row(perms_[t][static_cast<size_t>(i)]);
      X = std::move(Y);
    }
    return X;
  }
  Matrix apply_transpose(const Matrix& M) const override {
    require(M.rows() == n_, "householder chain apply: dims");
    Matrix X = M;
    for (size_t t = 0; t < w_.size(); ++t) {
      Matrix Y(n_, X.cols());
      for (Index i = 0; i < n_; ++i) Y.row(perms_[t][static_cast<size_t>(i)]) = X.row(i);
      reflect(w_[t], Y);
      X = std::move(Y);
    }
    return X;
  }

private:
  static void reflect(const Vector& w, Matrix& X) {
    op_counter().muls += 2ull * static_cast<unsigned long long>(X.size());
    op_counter().adds += 2ull * static_cast<unsigned long long>(X.size());
    X -= w * ((2.0 / w.squaredNorm()) * (w.transpose() * X));
  }
  std::vector<Vector> w_;
  std::vector<std::vector<Index>> perms_;
  Index n_ = 0;
};

// ---------------------------------------------------------------- Gaussian

class GaussianOp final : public SketchOperator {
public:
  explicit GaussianOp(Matrix G) : G_(std::move(G)) {}
  Index rows() const override { return G_.rows(); }
  Index cols() const override { return G_.cols(); }
  std::string kind() const override { return "gaussian"; }
  nlohmann::json descriptor() const override {
    return {{"kind", kind()}, {"rows", G_.rows()}, {"cols", G_.cols()}};
  }
  Matrix apply(const Matrix& M) const override {
    require(M.rows() == cols(), "gaussian apply: dims");
    const auto work = static_cast<unsigned long long>(G_.rows() * G_.cols() * M.cols());
    op_counter().muls += work;
    op_counter().adds += work;
    return G_ * M;
  }
  Matrix apply_transpose(const Matrix& M) const override {
    require(M.rows() == rows(), "gaussian apply: dims");
    const auto work = static_cast<unsigned long long>(G_.rows() * G_.cols() * M.cols());
    op_counter().muls += work;
    op_counter().adds += work;
    return G_.transpose() * M;
  }

private:
  Matrix G_;
};

// ---------------------------------------------------------------- Sub-identity

class SubIdentityOp final : public SketchOperator {
public:
  SubIdentityOp(IndexSet sel, Index total) : sel_(std::move(sel)), total_(total) {
    require(sel_.bound() == total, "sub-identity: index bound mismatch");
  }
  Index rows() const override { return sel_.size(); }
  Index cols() const override { return total_; }
  std::string kind() const override { return "sub_identity"; }
  nlohmann::json descriptor() const override {
    return {{"kind", kind()}, {"selected", sel_.indices()}, {"total", total_}};
  }
  Matrix apply(const Matrix& M) const override {
    require(M.rows() == total_, "sub-identity apply: dims");
    return select_rows(M, sel_);  // zero arithmetic
  }
  Matrix apply_transpose(const Matrix& M) const override {
    require(M.rows() == sel_.size(), "sub-identity apply: dims");
    Matrix out = Matrix::Zero(total_, M.cols());
    for (Index t = 0; t < sel_.size(); ++t) out.row(sel_[t]) = M.row(t);
    return out;
  }

private:
  IndexSet sel_;
  Index total_;
};

// ---------------------------------------------------------------- composites

class SumOp final : public SketchOperator {
public:
  SumOp(std::vector<OpPtr> ops, std::vector<int> signs)
      : ops_(std::move(ops)), signs_(std::move(signs)) {
    require(!ops_.empty() && ops_.size() == signs_.size(), "sum: size mismatch");
    for (auto& op : ops_)
      require(op->rows() == ops_[0]->rows() && op->cols() == ops_[0]->cols(),
              "sum: dimension mismatch");
    for (int s : signs_) require(s == 1 || s == -1, "sum: signs must be +-1");
  }
  Index rows() const override { return ops_[0]->rows(); }
  Index cols() const override { return ops_[0]->cols(); }
  bool is_complex() const override {
    return std::any_of(ops_.begin(), ops_.end(), [](auto& o) { return o->is_complex(); });
  }
  std::string kind() const override { return "sum"; }
  nlohmann::json descriptor() const override {
    nlohmann::json terms = nlohmann::json::array();
    for (size_t i = 0; i < ops_.size(); ++i)
      terms.push_back({{"sign", signs_[i]}, {"op", ops_[i]->descriptor()}});
    return {{"kind", kind()}, {"terms", terms}};
  }
  Matrix apply(const Matrix& M) const override {
    Matrix out = static_cast<double>(signs_[0]) * ops_[0]->apply(M);
    for (size_t i = 1; i < ops_.size(); ++i) {
      op_counter().adds += static_cast<unsigned long long>(out.size());
      out += static_cast<double>(signs_[i]) * ops_[i]->apply(M);
    }
    return out;
  }
  Matrix apply_transpose(const Matrix& M) const override {
    Matrix out = static_cast<double>(signs_[0]) * ops_[0]->apply_transpose(M);
    for (size_t i = 1; i < ops_.size(); ++i) {
      op_counter().adds += static_cast<unsigned long long>(out.size());
      out += static_cast<double>(signs_[i]) * ops_[i]->apply_transpose(M);
    }
    return out;
  }
  CMatrix apply_complex(const CMatrix& M) const override {
    CMatrix out = static_cast<double>(signs_[0]) * ops_[0]->apply_complex(M);
    for (size_t i = 1; i < ops_.size(); ++i)
      out += static_cast<double>(signs_[i]) * ops_[i]->apply_complex(M);
    return out;
  }
  CMatrix apply_transpose_complex(const CMatrix& M) const override {
    CMatrix out = static_cast<double>(signs_[0]) * ops_[0]->apply_transpose_complex(M);
    for (size_t i = 1; i < ops_.size(); ++i)
      out += static_cast<double>(signs_[i]) * ops_[i]->apply_transpose_complex(M);
    return out;
  }

private:
  std::vector<OpPtr> ops_;
  std::vector<int> signs_;
};

class ProductOp final : public SketchOperator {
public:
  explicit ProductOp(std::vector<OpPtr> ops) : ops_(std::move(ops)) {
    require(!ops_.empty(), "product: empty");
    for (size_t i = 0; i + 1 < ops_.size(); ++i)
      require(ops_[i]->cols() == ops_[i + 1]->rows(), "product: dimension mismatch");
  }
  Index rows() const override { return ops_.front()->rows(); }
  Index cols() const override { return ops_.back()->cols(); }
  bool is_complex() const override {
    return std::any_of(ops_.begin(), ops_.end(), [](auto& o) { return o->is_complex(); });
  }
  std::string kind() const override { return "product"; }
  nlohmann::json descriptor() const override {
    nlohmann::json factors = nlohmann::json::array();
    for (auto& op : ops_) factors.push_back(op->descriptor());
    return {{"kind", kind()}, {"factors", factors}};
  }
  Matrix apply(const Matrix& M) const override {
    Matrix out = M;
    for (size_t i = ops_.size(); i-- > 0;) out = ops_[i]->apply(out);
    return out;
  }
  Matrix apply_transpose(const Matrix& M) const override {
    Matrix out = M;
    for (auto& op : ops_) out = op->apply_transpose(out);
    return out;
  }
  CMatrix apply_complex(const CMatrix& M) const override {
    CMatrix out = M;
    for (size_t i = ops_.size(); i-- > 0;) out = ops_[i]->apply_complex(out);
    return out;
  }
  CMatrix apply_transpose_complex(const CMatrix& M) const override {
    CMatrix out = M;
    for (auto& op : ops_) out = op->apply_transpose_complex(out);
    return out;
  }

private:
  std::vector<OpPtr> ops_;
};

class ColumnSliceOp final : public SketchOperator {
public:
  ColumnSliceOp(OpPtr inner, IndexSet columns)
      : inner_(std::move(inner)), cols_(std::move(columns)) {
    require(cols_.bound() == inner_->cols(), "column slice: bound mismatch");
  }
  Index rows() const override { return inner_->rows(); }
  Index cols() const override { return cols_.size(); }
  bool is_complex() const override { return inner_->is_complex(); }
  std::string kind() const override { return "column_slice"; }
  nlohmann::json descriptor() const override {
    return {{"kind", kind()}, {"columns", cols_.indices()}, {"inner", inner_->descriptor()}};
  }
  Matrix apply(const Matrix& M) const override {
    require(M.rows() == cols_.size(), "column slice apply: dims");
    Matrix full = Matrix::Zero(inner_->cols(), M.cols());
    for (Index t = 0; t < cols_.size(); ++t) full.row(cols_[t]) = M.row(t);
    return inner_->apply(full);
  }
  Matrix apply_transpose(const Matrix& M) const override {
    Matrix full = inner_->apply_transpose(M);
    return select_rows(full, cols_);
  }
  CMatrix apply_complex(const CMatrix& M) const override {
    CMatrix full = CMatrix::Zero(inner_->cols(), M.cols());
    for (Index t = 0; t < cols_.size(); ++t) full.row(cols_[t]) = M.row(t);
    return inner_->apply_complex(full);
  }
  CMatrix apply_transpose_complex(const CMatrix& M) const override {
    CMatrix full = inner_->apply_transpose_complex(M);
    CMatrix out(cols_.size(), M.cols());
    for (Index t = 0; t < cols_.size(); ++t) out.row(t) = full.row(cols_[t]);
    return out;
  }

private:
  OpPtr inner_;
  IndexSet cols_;
};

}  // namespace

// ---------------------------------------------------------------- factories

OpPtr make_permutation(std::vector<Index> sigma) {
  return std::make_shared<PermutationOp>(std::move(sigma));
}
OpPtr make_sign_diagonal(Vector d) { return std::make_shared<SignDiagonalOp>(std::move(d)); }
OpPtr make_abridged_hadamard(Index n, int d) {
  return std::make_shared<AbridgedHadamardOp>(n, d);
}
OpPtr make_abridged_fourier(Index n, int d) {
  return std::make_shared<AbridgedFourierOp>(n, d);
}
OpPtr make_sparse_circulant(Index n, double f, std::vector<std::pair<Index, double>> nonzeros) {
  return std::make_shared<SparseCirculantOp>(n, f, std::move(nonzeros));
}
OpPtr make_inverse_bidiagonal(Vector subdiag, bool lower) {
  return std::make_shared<InverseBidiagonalOp>(std::move(subdiag), lower);
}
OpPtr make_householder_chain(std::vector<Vector> reflectors,
                             std::vector<std::vector<Index>> perms) {
  return std::make_shared<HouseholderChainOp>(std::move(reflectors), std::move(perms));
}
OpPtr make_gaussian(Matrix G) { return std::make_shared<GaussianOp>(std::move(G)); }
OpPtr make_sub_identity(IndexSet selected, Index total) {
  return std::make_shared<SubIdentityOp>(std::move(selected), total);
}
OpPtr make_sum(std::vector<OpPtr> ops, std::vector<int> signs) {
  return std::make_shared<SumOp>(std::move(ops), std::move(signs));
}
OpPtr make_product(std::vector<OpPtr> ops) {
  return std::make_shared<ProductOp>(std::move(ops));
}
OpPtr take_columns(OpPtr op, IndexSet columns) {
  return std::make_shared<ColumnSliceOp>(std::move(op), std::move(columns));
}
OpPtr take_columns(OpPtr op, Index l, ColumnMode mode, Rng& rng) {
  require(l >= 1 && l <= op->cols(), "take_columns: l out of range");
  std::vector<Index> cols;
  if (mode == ColumnMode::Leftmost) {
    for (Index i = 0; i < l; ++i) cols.push_back(i);
  } else {
    cols = rng.distinct_indices(l, op->cols());
  }
  const Index bound = op->cols();
  return take_columns(std::move(op), IndexSet(std::move(cols), bound));
}

OpPtr gen_permutation(Index n, Rng& rng) { return make_permutation(rng.permutation(n)); }
OpPtr gen_sign_diagonal(Index n, Rng& rng) {
  Vector d(n);
  for (Index i = 0; i < n; ++i) d(i) = rng.sign();
  return make_sign_diagonal(std::move(d));
}
OpPtr gen_scaled_diagonal(Index n, Rng& rng) {
  Vector d(n);
  for (Index i = 0; i < n; ++i)
    d(i) = static_cast<double>(rng.sign()) * static_cast<double>(1 + rng.uniform_index(4));
  return make_sign_diagonal(std::move(d));
}
OpPtr gen_sparse_circulant(Index n, Index s, Rng& rng) {
  std::vector<std::pair<Index, double>> nz;
  for (Index k : rng.distinct_indices(s, n)) nz.emplace_back(k, static_cast<double>(rng.sign()));
  const double f = static_cast<double>(rng.sign());
  return make_sparse_circulant(n, f, std::move(nz));
}
OpPtr gen_inverse_bidiagonal(Index n, Rng& rng) {
  Vector b(n - 1);
  for (Index i = 0; i < n - 1; ++i) b(i) = rng.sign();
  return make_inverse_bidiagonal(std::move(b));
}
OpPtr gen_householder_chain(Index n, Index q, Rng& rng) {
  std::vector<Vector> w;
  std::vector<std::vector<Index>> perms;
  for (Index t = 0; t < q; ++t) {
    w.push_back(rng.gaussian_vector(n));
    perms.push_back(rng.permutation(n));
  }
  return make_householder_chain(std::move(w), std::move(perms));
}
OpPtr gen_gaussian(Index rows, Index cols, Rng& rng) {
  return make_gaussian(rng.gaussian_matrix(rows, cols));
}
OpPtr gen_aph(Index n, int d, Rng& rng) {
  return make_product({gen_permutation(n, rng), make_abridged_hadamard(n, d)});
}
OpPtr gen_asph(Index n, int d, Rng& rng, bool scaled_diag) {
  OpPtr diag = scaled_diag ? gen_scaled_diagonal(n, rng) : gen_sign_diagonal(n, rng);
  return make_product({gen_permutation(n, rng), std::move(diag), make_abridged_hadamard(n, d)});
}

// ---------------------------------------------------------------- helpers

Matrix apply(const SketchOperator& op, const Matrix& M, Side side) {
  if (side == Side::Left) return op.apply(M);
  return op.apply_transpose(M.transpose()).transpose();
}

Matrix materialize(const SketchOperator& op, Index cap) {
  require(op.rows() <= cap && op.cols() <= cap, "materialize: cap exceeded");
  if (op.is_complex()) throw std::logic_error("materialize: complex operator");
  return op.apply(Matrix::Identity(op.cols(), op.cols()));
}

CMatrix materialize_complex(const SketchOperator& op, Index cap) {
  require(op.rows() <= cap && op.cols() <= cap, "materialize: cap exceeded");
  return op.apply_complex(CMatrix::Identity(op.cols(), op.cols()));
}

// ------------------------------------------------ bidiagonal-product generator

Matrix bidiagonal_factor(Index n, const std::vector<int>& signs) {
  require(static_cast<Index>(signs.size()) == n, "bidiagonal_factor: need n signs");
  Matrix B = Matrix::Identity(n, n);
  B(0, n - 1) = signs[0];
  for (Index i = 1; i < n; ++i) B(i, i - 1) = signs[static_cast<size_t>(i)];
  return B;
}

namespace {

struct BidiagFactor {
  std::vector<int> signs;       // corner + subdiagonal
  std::vector<Index> colperm;   // column permutation applied after
};

std::vector<BidiagFactor> draw_factors(Index n, Index T, Rng& rng) {
  std::vector<BidiagFactor> fs;
  fs.reserve(static_cast<size_t>(T));
  for (Index t = 0; t < T; ++t) {
    BidiagFactor f;
    f.signs.resize(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) f.signs[static_cast<size_t>(i)] = rng.sign();
    f.colperm = rng.permutation(n);
    fs.push_back(std::move(f));
  }
  return fs;
}

// y = (L P) x for the sparse factor: P permutes entries, L adds the signed
// previous entry (with wraparound at the top).
Vector factor_times(const BidiagFactor& f, const Vector& x) {
  const Index n = x.size();
  Vector p(n);
  // Column permutation matrix Pi with (B Pi): (B Pi) x = B (Pi x), where
  // (Pi x)_i = x at the column placed at position i.
  for (Index i = 0; i < n; ++i) p(i) = x(f.colperm[static_cast<size_t>(i)]);
  Vector y(n);
  y(0) = p(0) + f.signs[0] * p(n - 1);
  for (Index i = 1; i < n; ++i) y(i) = p(i) + f.signs[static_cast<size_t>(i)] * p(i - 1);
  return y;
}

}  // namespace

Matrix gen_bidiagonal_product(Index n, Index T, Rng& rng, bool standardize) {
  auto fs = draw_factors(n, T, rng);
  Matrix G(n, n);
  for (Index j = 0; j < n; ++j) {
    Vector v = Vector::Zero(n);
    v(j) = 1.0;
    for (Index t = T; t-- > 0;) v = factor_times(fs[static_cast<size_t>(t)], v);
    G.col(j) = v;
  }
  if (standardize && T > 0) {
    for (Index j = 0; j < n; ++j) {
      const double mean = G.col(j).mean();
      const double var = (G.col(j).array() - mean).square().mean();
      if (var > 0) G.col(j) = (G.col(j).array() - mean) / std::sqrt(var);
    }
  }
  return G;
}

Vector bidiagonal_product_column(Index n, Index T, Index j, Rng& rng) {
  auto fs = draw_factors(n, T, rng);
  Vector v = Vector::Zero(n);
  v(j) = 1.0;
  for (Index t = T; t-- > 0;) v = factor_times(fs[static_cast<size_t>(t)], v);
  return v;
}

KsResult ks_normality(const std::vector<double>& sample) {
  require(sample.size() >= 30, "ks_normality: need at least 30 samples");
  const auto n = sample.size();
  double mean = 0;
  for (double x : sample) mean += x;
  mean /= static_cast<double>(n);
  double var = 0;
  for (double x : sample) var += (x - mean) * (x - mean);
  var /= static_cast<double>(n);
  if (var <= 0) throw std::invalid_argument("ks_normality: degenerate sample");
  std::vector<double> z(sample);
  for (double& x : z) x = (x - mean) / std::sqrt(var);
  std::sort(z.begin(), z.end());
  double d = 0;
  for (size_t i = 0; i < n; ++i) {
    const double cdf = 0.5 * std::erfc(-z[i] / std::numbers::sqrt2);
    d = std::max(d, std::abs(cdf - static_cast<double>(i + 1) / static_cast<double>(n)));
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / static_cast<double>(n)));
  }
  KsResult out;
  out.statistic = d;
  out.pass = d < 1.36 / std::sqrt(static_cast<double>(n));
  return out;
}

}  // namespace slra
