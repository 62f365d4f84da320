#include "slra/cur.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "slra/errors.hpp"
#include "slra/lra.hpp"

namespace slra {

namespace {

Matrix rows_of_dense(const Matrix& M, const IndexSet& I) {
  Matrix out(I.size(), M.cols());
  for (Index t = 0; t < I.size(); ++t) out.row(t) = M.row(I[t]);
  return out;
}

Matrix cols_of_dense(const Matrix& M, const IndexSet& J) {
  Matrix out(M.rows(), J.size());
  for (Index t = 0; t < J.size(); ++t) out.col(t) = M.col(J[t]);
  return out;
}

}  // namespace

std::string CurDecomposition::serialize() const {
  std::ostringstream out;
  out.precision(17);
  out << "cur " << r << " " << row_set.size() << " " << col_set.size() << " "
      << (qr_nucleus ? 1 : 0) << "\n";
  out << row_set.bound();
  for (Index i : row_set) out << " " << i;
  out << "\n" << col_set.bound();
  for (Index j : col_set) out << " " << j;
  out << "\n";
  for (Index i = 0; i < nucleus.rows(); ++i) {
    for (Index j = 0; j < nucleus.cols(); ++j)
      out << (j ? " " : "") << nucleus(i, j);
    out << "\n";
  }
  return out.str();
}

CurDecomposition CurDecomposition::deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  Index r, k, l;
  int qrn;
  if (!(in >> tag >> r >> k >> l >> qrn) || tag != "cur")
    throw std::runtime_error("CurDecomposition: bad header");
  auto read_set = [&](Index count) {
    Index bound;
    if (!(in >> bound)) throw std::runtime_error("CurDecomposition: bad index set");
    std::vector<Index> idx(static_cast<size_t>(count));
    for (auto& v : idx)
      if (!(in >> v)) throw std::runtime_error("CurDecomposition: bad index set");
    return IndexSet(std::move(idx), bound);
  };
  CurDecomposition c;
  c.r = r;
  c.qr_nucleus = qrn != 0;
  c.row_set = read_set(k);
  c.col_set = read_set(l);
  c.nucleus = Matrix(l, k);
  for (Index i = 0; i < l; ++i)
    for (Index j = 0; j < k; ++j)
      if (!(in >> c.nucleus(i, j)))
        throw std::runtime_error("CurDecomposition: bad nucleus");
  return c;
}

Matrix cur_reconstruct(const Matrix& M, const CurDecomposition& c) {
  return cols_of_dense(M, c.col_set) * c.nucleus * rows_of_dense(M, c.row_set);
}

double cur_evaluate(const Matrix& M, const CurDecomposition& c, NormKind norm) {
  return matrix_norm(M - cur_reconstruct(M, c), norm);
}

double t_factor(Index q, Index s, double h) {
  return std::sqrt(static_cast<double>(q - s) * static_cast<double>(s) * h * h + 1.0);
}

IndexSet maxvol_rows(const Matrix& A, double h, Index max_swaps) {
  const Index m = A.rows(), r = A.cols();
  if (r < 1 || m < r) throw std::invalid_argument("maxvol_rows: need m >= r >= 1");
  if (h < 1.0) throw std::invalid_argument("maxvol_rows: need h >= 1");
  if (max_swaps == 0) max_swaps = 4 * r;

  // start from the pivot rows of a column-pivoted QR of A^T
  Eigen::ColPivHouseholderQR<Matrix> init(A.transpose());
  auto piv = init.colsPermutation().indices();
  std::vector<Index> I(static_cast<size_t>(r));
  for (Index t = 0; t < r; ++t) I[static_cast<size_t>(t)] = piv(t);

  for (Index swap = 0; swap <= max_swaps; ++swap) {
    Matrix G(r, r);
    for (Index t = 0; t < r; ++t) G.row(t) = A.row(I[static_cast<size_t>(t)]);
    Eigen::ColPivHouseholderQR<Matrix> qr(G.transpose());
    qr.setThreshold(1e-12);
    if (qr.rank() < r)
      throw SelectionFailure("maxvol_rows: singular pivot block");
    Matrix B = qr.solve(A.transpose()).transpose();  // A G^{-1}, m x r

    Index bi = 0, bj = 0;
    const double mx = B.cwiseAbs().maxCoeff(&bi, &bj);
    if (mx <= h) break;
    if (swap == max_swaps) break;  // budget exhausted; return current block
    I[static_cast<size_t>(bj)] = bi;
  }
  return IndexSet(I, m);
}

IndexSet select_rows_spanning(const Matrix& A, Index count, double h) {
  const Index m = A.rows();
  if (count > m) throw std::invalid_argument("select_rows_spanning: count > rows");
  Matrix Q = thin_qr(A).first;
  const Index r = std::min(count, Q.cols());
  IndexSet base = maxvol_rows(Q.leftCols(r), h);
  if (count == r) return base;

  // pad with the largest remaining rows of the basis
  std::vector<Index> idx(base.begin(), base.end());
  std::vector<std::pair<double, Index>> rest;
  for (Index i = 0; i < m; ++i)
    if (!base.contains(i)) rest.emplace_back(Q.row(i).norm(), i);
  std::sort(rest.begin(), rest.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  for (Index t = 0; t < count - r; ++t) idx.push_back(rest[static_cast<size_t>(t)].second);
  return IndexSet(std::move(idx), m);
}

CurDecomposition primitive_cur(const EntryOracle& M, IndexSet I, IndexSet J,
                               Index r, bool qr_nucleus) {
  if (I.size() < r || J.size() < r || r < 1)
    throw std::invalid_argument("primitive_cur: need |I|, |J| >= r >= 1");
  Matrix G = M.block(I, J);  // k x l, the only entries read
  CurDecomposition c;
  c.row_set = std::move(I);
  c.col_set = std::move(J);
  c.r = r;
  c.qr_nucleus = qr_nucleus;
  if (qr_nucleus) {
    // cheaper pseudo-inverse straight from QR, no rank-r truncation
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(G);
    cod.setThreshold(1e-10);
    if (cod.rank() < r)
      throw GeneratorRankFailure("primitive_cur: generator rank below target");
    c.nucleus = cod.pseudoInverse();
  } else {
    Svd f = svd(G);
    if (f.sigma(0) <= 0 || f.sigma(r - 1) <= 1e-10 * f.sigma(0))
      throw GeneratorRankFailure("primitive_cur: generator rank below target");
    c.nucleus = f.T.leftCols(r) * f.sigma.head(r).cwiseInverse().asDiagonal() *
                f.S.leftCols(r).transpose();
  }
  return c;
}

CurDecomposition primitive_cur(const Matrix& M, IndexSet I, IndexSet J, Index r,
                               bool qr_nucleus) {
  DenseOracle o(M);
  return primitive_cur(o, std::move(I), std::move(J), r, qr_nucleus);
}

CurDecomposition cynical_cur(const EntryOracle& M, Index p, Index q, Index k,
                             Index l, Index r, Rng& rng) {
  const Index m = M.rows(), n = M.cols();
  if (!(r >= 1 && r <= k && k <= p && p <= m && r <= l && l <= q && q <= n))
    throw std::invalid_argument("cynical_cur: need r <= k <= p <= m, r <= l <= q <= n");
  const IndexSet P(rng.distinct_indices(p, m), m);
  const IndexSet Q(rng.distinct_indices(q, n), n);
  Matrix B = M.block(P, Q);
  Svd f = svd(B);
  if (f.sigma(0) <= 0 || f.sigma(r - 1) <= 1e-10 * f.sigma(0))
    throw GeneratorRankFailure("cynical_cur: sub-block rank below target");

  IndexSet rows_local = select_rows_spanning(f.S.leftCols(r), k);
  IndexSet cols_local = select_rows_spanning(f.T.leftCols(r), l);
  std::vector<Index> I, J;
  for (Index t : rows_local) I.push_back(P[t]);
  for (Index t : cols_local) J.push_back(Q[t]);
  return primitive_cur(M, IndexSet(std::move(I), m), IndexSet(std::move(J), n), r);
}

namespace {

double block_volume(const Matrix& Q, const IndexSet& I) {
  if (I.size() != Q.cols()) return 0;
  Matrix G(I.size(), Q.cols());
  for (Index t = 0; t < I.size(); ++t) G.row(t) = Q.row(I[t]);
  return std::abs(G.determinant());
}

}  // namespace

std::pair<CurDecomposition, CaTrace> cross_approx(
    const EntryOracle& M, Index r, Index k, Index l, IndexSet init_rows,
    int loops, double h, std::optional<double> stop_tol, Rng& rng) {
  const Index m = M.rows(), n = M.cols();
  if (k < r || l < r || r < 1) throw std::invalid_argument("cross_approx: need k, l >= r >= 1");
  if (loops < 1) throw std::invalid_argument("cross_approx: need loops >= 1");
  IndexSet I = (init_rows.size() == k && init_rows.bound() == m)
                   ? std::move(init_rows)
                   : IndexSet(rng.distinct_indices(k, m), m);
  IndexSet J;

  CaTrace trace;
  for (int loop = 0; loop < loops; ++loop) {
    // vertical: choose columns inside the current k x n row strip
    Matrix R = M.rows_of(I);
    J = select_rows_spanning(R.transpose(), l, h);
    {
      CaStep st;
      st.horizontal = false;
      st.rows.assign(I.begin(), I.end());
      st.cols.assign(J.begin(), J.end());
      st.volume_proxy = block_volume(thin_qr(Matrix(R.transpose())).first, J);
      trace.steps.push_back(std::move(st));
    }

    // horizontal: choose rows inside the m x l column strip
    Matrix C = M.cols_of(J);
    I = select_rows_spanning(C, k, h);
    {
      CaStep st;
      st.horizontal = true;
      st.rows.assign(I.begin(), I.end());
      st.cols.assign(J.begin(), J.end());
      st.volume_proxy = block_volume(thin_qr(C).first, I);
      if (stop_tol) {
        try {
          CurDecomposition probe = primitive_cur(M, I, J, r);
          LowRankFactors f;
          f.U = M.cols_of(J) * probe.nucleus;
          f.V = M.rows_of(I);
          f.target_rank = r;
          const Index q = std::min<Index>(20, m), s = std::min<Index>(20, n);
          st.error_estimate =
              posterior_error_estimate(M, f, q, s, rng).estimate_frobenius;
        } catch (const GeneratorRankFailure&) {
          st.error_estimate.reset();
        }
      }
      const bool stop = stop_tol && st.error_estimate && *st.error_estimate <= *stop_tol;
      trace.steps.push_back(std::move(st));
      if (stop) break;
    }
  }
  return {primitive_cur(M, std::move(I), std::move(J), r), std::move(trace)};
}

Svd lra_to_top_svd(const Matrix& A, const Matrix& W, const Matrix& B, Index r) {
  if (A.cols() != W.rows() || W.cols() != B.rows())
    throw std::invalid_argument("lra_to_top_svd: inner dimension mismatch");
  if (r < 1 || r > std::min(W.rows(), W.cols()))
    throw std::invalid_argument("lra_to_top_svd: bad rank");
  auto [QA, RA] = thin_qr(A);
  auto [QB, RB] = thin_qr(Matrix(B.transpose()));
  Svd core = svd(Matrix(RA * W * RB.transpose()));
  if (core.sigma(0) <= 0 || core.sigma(r - 1) <= 1e-13 * core.sigma(0))
    throw GeneratorRankFailure("lra_to_top_svd: core rank below target");
  Svd out;
  out.S = QA * core.S.leftCols(r);
  out.sigma = core.sigma.head(r);
  out.T = QB * core.T.leftCols(r);
  return out;
}

Svd lra_to_top_svd(const LowRankFactors& f, Index r) {
  return lra_to_top_svd(f.U, Matrix::Identity(f.l(), f.l()), f.V, r);
}

CurDecomposition top_svd_to_cur(const Svd& f, Index k, Index l, double h,
                                CurSelector selector, Rng& rng) {
  const Index m = f.S.rows(), n = f.T.rows(), r = f.sigma.size();
  if (k < r || l < r) throw std::invalid_argument("top_svd_to_cur: need k, l >= r");

  IndexSet I, J;
  if (selector == CurSelector::Deterministic) {
    I = select_rows_spanning(f.S, k, h);
    J = select_rows_spanning(f.T, l, h);
  } else {
    // norm-square (leverage) sampling on the singular factors
    auto sample = [&](const Matrix& X, Index count) {
      std::vector<double> p(static_cast<size_t>(X.rows()));
      double tot = 0;
      for (Index i = 0; i < X.rows(); ++i) tot += (p[static_cast<size_t>(i)] = X.row(i).squaredNorm());
      std::vector<Index> picked;
      std::vector<char> used(static_cast<size_t>(X.rows()), 0);
      int guard = 0;
      while (static_cast<Index>(picked.size()) < count) {
        if (++guard > 10000)
          throw SelectionFailure("top_svd_to_cur: sampling failed to find distinct indices");
        double u = rng.uniform() * tot;
        Index i = 0;
        while (i + 1 < X.rows() && u > p[static_cast<size_t>(i)]) u -= p[static_cast<size_t>(i)], ++i;
        if (!used[static_cast<size_t>(i)]) {
          used[static_cast<size_t>(i)] = 1;
          picked.push_back(i);
        }
      }
      return IndexSet(std::move(picked), X.rows());
    };
    I = sample(f.S, k);
    J = sample(f.T, l);
  }

  Matrix SI(k, r), TJ(l, r);
  for (Index t = 0; t < k; ++t) SI.row(t) = f.S.row(I[t]);
  for (Index t = 0; t < l; ++t) TJ.row(t) = f.T.row(J[t]);
  CurDecomposition c;
  c.r = r;
  c.nucleus = pseudo_inverse(Matrix(TJ.transpose())) *
              f.sigma.cwiseInverse().asDiagonal() * pseudo_inverse(SI);
  c.row_set = std::move(I);
  c.col_set = std::move(J);
  return c;
}

}  // namespace slra
