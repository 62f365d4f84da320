#pragma once

#include <string>
#include <vector>

#include "slra/linalg.hpp"
#include "slra/oracle.hpp"
#include "slra/rng.hpp"

namespace slra {

/// One low-rank off-diagonal block: the sub-matrix at (row0, col0) of shape
/// rows x cols approximated as F * H with inner dimension <= r.
struct HssBlock {
  Index row0 = 0, col0 = 0, rows = 0, cols = 0;
  Matrix F;  // rows x rho
  Matrix H;  // rho x cols
  bool rank_overflow = false;  // tol not met at the rank cap
};

struct HssLeaf {
  Index row0 = 0, col0 = 0;
  Matrix D;
};

/// Hierarchically semi-separable approximation of a square matrix: dense
/// diagonal leaves plus two low-rank off-diagonal blocks per internal node.
struct HssMatrix {
  Index n = 0;
  int depth = 0;
  Index leaf = 0;
  Index r = 0;
  std::vector<HssLeaf> diag;
  std::vector<HssBlock> off;
  bool any_overflow = false;

  std::string serialize() const;
  static HssMatrix deserialize(const std::string& text);
};

enum class HssStrategy { Svd, CurCa };

/// Recursive 2 x 2 partition to depth L (n divisible by 2^L, leaf >= r).
/// Each off-diagonal block gets the smallest rank <= r meeting the relative
/// Frobenius tolerance (binary search); svd truncates densely, cur_ca uses
/// cross-approximation and reads only strips of each block. Blocks that miss
/// tol at rank r are kept and flagged.
HssMatrix build_hss(const EntryOracle& M, int L, Index r, double tol,
                    HssStrategy strategy, Rng& rng);
HssMatrix build_hss(const Matrix& M, int L, Index r, double tol,
                    HssStrategy strategy, Rng& rng);

/// O(n (leaf + r L)) multiply; adds its flops to op_counter().
Vector hss_matvec(const HssMatrix& H, const Vector& x);

Matrix hss_reconstruct(const HssMatrix& H);
double hss_error(const HssMatrix& H, const Matrix& M, NormKind norm);

}  // namespace slra
