#pragma once

#include <functional>

#include "slra/matrix.hpp"

namespace slra {

/// Entry-access view of a matrix. Sublinear algorithms take this interface so
/// tests can count exactly how many entries were read.
class EntryOracle {
public:
  virtual ~EntryOracle() = default;
  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  virtual double entry(Index i, Index j) const = 0;

  Matrix rows_of(const IndexSet& I) const;
  Matrix cols_of(const IndexSet& J) const;
  Matrix block(const IndexSet& I, const IndexSet& J) const;
  Matrix dense() const;
};

/// Counts entry reads of a dense matrix (the matrix is not owned).
class DenseOracle final : public EntryOracle {
public:
  explicit DenseOracle(const Matrix& M) : M_(&M) {}
  Index rows() const override { return M_->rows(); }
  Index cols() const override { return M_->cols(); }
  double entry(Index i, Index j) const override {
    ++accesses_;
    return (*M_)(i, j);
  }
  unsigned long long accesses() const { return accesses_; }
  void reset_accesses() { accesses_ = 0; }

private:
  const Matrix* M_;
  mutable unsigned long long accesses_ = 0;
};

/// Implicit matrix defined by a function (i, j) -> value.
class FunctionOracle final : public EntryOracle {
public:
  FunctionOracle(Index rows, Index cols, std::function<double(Index, Index)> f)
      : rows_(rows), cols_(cols), f_(std::move(f)) {}
  Index rows() const override { return rows_; }
  Index cols() const override { return cols_; }
  double entry(Index i, Index j) const override { return f_(i, j); }

private:
  Index rows_, cols_;
  std::function<double(Index, Index)> f_;
};

}  // namespace slra
