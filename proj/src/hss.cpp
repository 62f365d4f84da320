#include "slra/hss.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "slra/cur.hpp"
#include "slra/errors.hpp"
#include "slra/lra.hpp"
#include "slra/sketch.hpp"

namespace slra {

namespace {

/// Offset window into another oracle.
class BlockOracle final : public EntryOracle {
public:
  BlockOracle(const EntryOracle& base, Index row0, Index col0, Index rows, Index cols)
      : base_(base), row0_(row0), col0_(col0), rows_(rows), cols_(cols) {}
  Index rows() const override { return rows_; }
  Index cols() const override { return cols_; }
  double entry(Index i, Index j) const override {
    return base_.entry(row0_ + i, col0_ + j);
  }

private:
  const EntryOracle& base_;
  Index row0_, col0_, rows_, cols_;
};

LowRankFactors zero_factors(Index rows, Index cols) {
  LowRankFactors f;
  f.U = Matrix::Zero(rows, 0);
  f.V = Matrix::Zero(0, cols);
  f.target_rank = 0;
  return f;
}

double sampled_frobenius(const EntryOracle& B, const LowRankFactors& f, Rng& rng) {
  const Index q = std::min<Index>(20, B.rows()), s = std::min<Index>(20, B.cols());
  return posterior_error_estimate(B, f, q, s, rng).estimate_frobenius;
}

// Rank-rho cross-approximation of the block as (F, H) factors with a sampled
// error estimate; throws the usual typed failures.
std::pair<LowRankFactors, double> ca_factors(const EntryOracle& B, Index rho,
                                             Rng& rng) {
  auto [c, trace] = cross_approx(B, rho, rho, rho, IndexSet(), 2, 1.1, std::nullopt, rng);
  LowRankFactors f;
  f.U = B.cols_of(c.col_set) * c.nucleus;
  f.V = B.rows_of(c.row_set);
  f.target_rank = rho;
  return {f, sampled_frobenius(B, f, rng)};
}

// Smallest rank <= r meeting the relative Frobenius tolerance; flags
// overflow when even rank r misses it.
HssBlock approx_block(const EntryOracle& M, Index row0, Index col0, Index rows,
                      Index cols, Index r, double tol, HssStrategy strategy,
                      Rng& rng) {
  HssBlock blk;
  blk.row0 = row0;
  blk.col0 = col0;
  blk.rows = rows;
  blk.cols = cols;
  BlockOracle B(M, row0, col0, rows, cols);

  if (strategy == HssStrategy::Svd) {
    Matrix D = B.dense();
    Svd f = svd(D);
    const Index nmin = f.sigma.size();
    const double total = f.sigma.norm();
    if (total <= 0) {
      blk.F = Matrix::Zero(rows, 0);
      blk.H = Matrix::Zero(0, cols);
      return blk;
    }
    // tail(rho) = Frobenius norm of what rank-rho truncation discards
    auto tail = [&](Index rho) {
      return (rho >= nmin) ? 0.0 : f.sigma.tail(nmin - rho).norm();
    };
    Index rho = std::min(r, nmin);
    for (Index cand = 0; cand <= std::min(r, nmin); ++cand)
      if (tail(cand) <= tol * total) {
        rho = cand;
        break;
      }
    blk.rank_overflow = tail(rho) > tol * total;
    blk.F = f.S.leftCols(rho) * f.sigma.head(rho).asDiagonal();
    blk.H = f.T.leftCols(rho).transpose();
    return blk;
  }

  // superfast path: norm estimate by sampling, then binary search on rank
  const double scale = sampled_frobenius(B, zero_factors(rows, cols), rng);
  if (scale <= 0) {
    blk.F = Matrix::Zero(rows, 0);
    blk.H = Matrix::Zero(0, cols);
    return blk;
  }
  const Index cap = std::min(r, std::min(rows, cols));
  LowRankFactors accepted, fallback;
  double fallback_err = -1;
  bool have_accepted = false;
  Index lo = 1, hi = cap;
  while (lo <= hi) {
    const Index mid = (lo + hi) / 2;
    try {
      auto [f, err] = ca_factors(B, mid, rng);
      if (err <= tol * scale) {
        accepted = f;  // meets tol: try smaller ranks
        have_accepted = true;
        hi = mid - 1;
      } else {
        if (fallback_err < 0 || err < fallback_err) {
          fallback = f;
          fallback_err = err;
        }
        lo = mid + 1;
      }
    } catch (const GeneratorRankFailure&) {
      hi = mid - 1;  // block behaves as lower-rank than mid
    } catch (const SelectionFailure&) {
      hi = mid - 1;
    }
  }
  if (have_accepted) {
    blk.F = accepted.U;
    blk.H = accepted.V;
  } else if (fallback_err >= 0) {
    blk.F = fallback.U;
    blk.H = fallback.V;
    blk.rank_overflow = true;
  } else {
    blk.F = Matrix::Zero(rows, 0);
    blk.H = Matrix::Zero(0, cols);
    blk.rank_overflow = true;
  }
  return blk;
}

void build_node(const EntryOracle& M, Index off0, Index size, int level, int L,
                Index r, double tol, HssStrategy strategy, Rng& rng, HssMatrix& out) {
  if (level == L) {
    HssLeaf leaf;
    leaf.row0 = leaf.col0 = off0;
    BlockOracle B(M, off0, off0, size, size);
    leaf.D = B.dense();
    out.diag.push_back(std::move(leaf));
    return;
  }
  const Index half = size / 2;
  HssBlock up = approx_block(M, off0, off0 + half, half, half, r, tol, strategy, rng);
  HssBlock lo = approx_block(M, off0 + half, off0, half, half, r, tol, strategy, rng);
  out.any_overflow = out.any_overflow || up.rank_overflow || lo.rank_overflow;
  out.off.push_back(std::move(up));
  out.off.push_back(std::move(lo));
  build_node(M, off0, half, level + 1, L, r, tol, strategy, rng, out);
  build_node(M, off0 + half, half, level + 1, L, r, tol, strategy, rng, out);
}

}  // namespace

HssMatrix build_hss(const EntryOracle& M, int L, Index r, double tol,
                    HssStrategy strategy, Rng& rng) {
  const Index n = M.rows();
  if (M.cols() != n) throw std::invalid_argument("build_hss: matrix must be square");
  if (L < 1) throw std::invalid_argument("build_hss: depth >= 1");
  const Index blocks = Index(1) << L;
  if (n % blocks != 0) throw std::invalid_argument("build_hss: n not divisible by 2^L");
  const Index leaf = n / blocks;
  if (leaf < r) throw std::invalid_argument("build_hss: leaf size below rank");

  HssMatrix out;
  out.n = n;
  out.depth = L;
  out.leaf = leaf;
  out.r = r;
  build_node(M, 0, n, 0, L, r, tol, strategy, rng, out);
  return out;
}

HssMatrix build_hss(const Matrix& M, int L, Index r, double tol,
                    HssStrategy strategy, Rng& rng) {
  DenseOracle o(M);
  return build_hss(o, L, r, tol, strategy, rng);
}

Vector hss_matvec(const HssMatrix& H, const Vector& x) {
  if (x.size() != H.n) throw std::invalid_argument("hss_matvec: length mismatch");
  Vector y = Vector::Zero(H.n);
  for (const HssLeaf& leaf : H.diag) {
    y.segment(leaf.row0, leaf.D.rows()) += leaf.D * x.segment(leaf.col0, leaf.D.cols());
    op_counter().muls += static_cast<unsigned long long>(leaf.D.size());
    op_counter().adds += static_cast<unsigned long long>(leaf.D.size());
  }
  for (const HssBlock& b : H.off) {
    if (b.F.cols() == 0) continue;
    Vector t = b.H * x.segment(b.col0, b.cols);
    y.segment(b.row0, b.rows) += b.F * t;
    const auto work = static_cast<unsigned long long>(b.F.size() + b.H.size());
    op_counter().muls += work;
    op_counter().adds += work;
  }
  return y;
}

Matrix hss_reconstruct(const HssMatrix& H) {
  Matrix M = Matrix::Zero(H.n, H.n);
  for (const HssLeaf& leaf : H.diag)
    M.block(leaf.row0, leaf.col0, leaf.D.rows(), leaf.D.cols()) = leaf.D;
  for (const HssBlock& b : H.off)
    if (b.F.cols() > 0) M.block(b.row0, b.col0, b.rows, b.cols) = b.F * b.H;
  return M;
}

double hss_error(const HssMatrix& H, const Matrix& M, NormKind norm) {
  return matrix_norm(M - hss_reconstruct(H), norm);
}

std::string HssMatrix::serialize() const {
  std::ostringstream out;
  out.precision(17);
  out << "hss " << n << " " << depth << " " << leaf << " " << r << " "
      << (any_overflow ? 1 : 0) << " " << diag.size() << " " << off.size() << "\n";
  auto dump = [&out](const Matrix& M) {
    out << M.rows() << " " << M.cols();
    for (Index j = 0; j < M.cols(); ++j)
      for (Index i = 0; i < M.rows(); ++i) out << " " << M(i, j);
    out << "\n";
  };
  for (const HssLeaf& leaf : diag) {
    out << "leaf " << leaf.row0 << " " << leaf.col0 << "\n";
    dump(leaf.D);
  }
  for (const HssBlock& b : off) {
    out << "block " << b.row0 << " " << b.col0 << " " << b.rows << " " << b.cols
        << " " << (b.rank_overflow ? 1 : 0) << "\n";
    dump(b.F);
    dump(b.H);
  }
  return out.str();
}

HssMatrix HssMatrix::deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  HssMatrix h;
  int overflow;
  size_t nleaf, noff;
  if (!(in >> tag >> h.n >> h.depth >> h.leaf >> h.r >> overflow >> nleaf >> noff) ||
      tag != "hss")
    throw std::runtime_error("HssMatrix: bad header");
  h.any_overflow = overflow != 0;
  auto load = [&in](Matrix& M) {
    Index rows, cols;
    if (!(in >> rows >> cols)) throw std::runtime_error("HssMatrix: bad matrix");
    M = Matrix(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i)
        if (!(in >> M(i, j))) throw std::runtime_error("HssMatrix: bad matrix");
  };
  for (size_t t = 0; t < nleaf; ++t) {
    HssLeaf leaf;
    if (!(in >> tag >> leaf.row0 >> leaf.col0) || tag != "leaf")
      throw std::runtime_error("HssMatrix: bad leaf");
    load(leaf.D);
    h.diag.push_back(std::move(leaf));
  }
  for (size_t t = 0; t < noff; ++t) {
    HssBlock b;
    int ov;
    if (!(in >> tag >> b.row0 >> b.col0 >> b.rows >> b.cols >> ov) || tag != "block")
      throw std::runtime_error("HssMatrix: bad block");
    b.rank_overflow = ov != 0;
    load(b.F);
    load(b.H);
    h.off.push_back(std::move(b));
  }
  return h;
}

}  // namespace slra
