#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace slra {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Ordered set of distinct zero-based indices into a dimension of size `bound`.
class IndexSet {
public:
  IndexSet() = default;
  IndexSet(std::vector<Index> idx, Index bound);

  static IndexSet iota(Index count, Index bound);

  Index size() const { return static_cast<Index>(idx_.size()); }
  Index bound() const { return bound_; }
  Index operator[](Index t) const { return idx_[static_cast<size_t>(t)]; }
  const std::vector<Index>& indices() const { return idx_; }
  bool contains(Index i) const;

  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }

private:
  std::vector<Index> idx_;
  Index bound_ = 0;
};

void check_finite(const Matrix& A, const char* what);

Matrix select_rows(const Matrix& A, const IndexSet& I);
Matrix select_cols(const Matrix& A, const IndexSet& J);
Matrix select_block(const Matrix& A, const IndexSet& I, const IndexSet& J);

}  // namespace slra
