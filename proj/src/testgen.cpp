#include "slra/testgen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "slra/oracle.hpp"

namespace slra {

Matrix EntryOracle::rows_of(const IndexSet& I) const {
  Matrix out(I.size(), cols());
  for (Index t = 0; t < I.size(); ++t)
    for (Index j = 0; j < cols(); ++j) out(t, j) = entry(I[t], j);
  return out;
}

Matrix EntryOracle::cols_of(const IndexSet& J) const {
  Matrix out(rows(), J.size());
  for (Index t = 0; t < J.size(); ++t)
    for (Index i = 0; i < rows(); ++i) out(i, t) = entry(i, J[t]);
  return out;
}

Matrix EntryOracle::block(const IndexSet& I, const IndexSet& J) const {
  Matrix out(I.size(), J.size());
  for (Index s = 0; s < I.size(); ++s)
    for (Index t = 0; t < J.size(); ++t) out(s, t) = entry(I[s], J[t]);
  return out;
}

Matrix EntryOracle::dense() const {
  Matrix out(rows(), cols());
  for (Index i = 0; i < rows(); ++i)
    for (Index j = 0; j < cols(); ++j) out(i, j) = entry(i, j);
  return out;
}

namespace {

Matrix random_orthonormal(Index rows, Index cols, Rng& rng) {
  return thin_qr(rng.gaussian_matrix(rows, cols)).first;
}

// Nodes/weights of Gauss-Legendre quadrature on [-1, 1] by Newton iteration
// on the Legendre recurrence.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<size_t>(n), 0.0);
  w.assign(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double xi = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = xi;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      double dx = p1 / dp;
      xi -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = xi;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
    x[static_cast<size_t>(i)] = xi;
    w[static_cast<size_t>(i)] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
}

Matrix laplacian_raw(Index n, int quad_points) {
  std::vector<double> gx, gw;
  gauss_legendre(quad_points, gx, gw);
  Matrix M(n, n);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (Index i = 0; i < n; ++i) {
    const double ti = step * static_cast<double>(i);
    const double tx = 2.0 * std::cos(ti), ty = 2.0 * std::sin(ti);
    for (Index j = 0; j < n; ++j) {
      const double a = step * static_cast<double>(j);
      double sum = 0;
      for (int q = 0; q < quad_points; ++q) {
        const double theta = a + 0.5 * step * (gx[static_cast<size_t>(q)] + 1.0);
        const double dx = tx - std::cos(theta), dy = ty - std::sin(theta);
        sum += gw[static_cast<size_t>(q)] * 0.5 * std::log(dx * dx + dy * dy);
      }
      M(i, j) = 0.5 * step * sum;
    }
  }
  return M;
}

}  // namespace

Matrix gen_svd_profile(Index n, Index r, Rng& rng) {
  if (r >= n) throw std::invalid_argument("gen_svd_profile: need r < n");
  Vector sigma(n);
  for (Index j = 0; j < n; ++j)
    sigma(j) = (j < r) ? 1.0 / static_cast<double>(j + 1) : 1e-10;
  Matrix S = random_orthonormal(n, n, rng);
  Matrix T = random_orthonormal(n, n, rng);
  return S * sigma.asDiagonal() * T.transpose();
}

Matrix gen_factor_gaussian(Index m, Index n, Index r, double noise, Rng& rng) {
  if (r > std::min(m, n)) throw std::invalid_argument("gen_factor_gaussian: r too large");
  Matrix M = rng.gaussian_matrix(m, r) * rng.gaussian_matrix(r, n);
  if (noise != 0) M += noise * rng.gaussian_matrix(m, n);
  return M;
}

Matrix gen_laplacian(Index n) {
  if (n < 4) throw std::invalid_argument("gen_laplacian: n >= 4");
  // Double the rule until entries settle.
  int pts = 32;
  Matrix M = laplacian_raw(n, pts);
  for (;;) {
    Matrix M2 = laplacian_raw(n, 2 * pts);
    const double change = (M2 - M).cwiseAbs().maxCoeff();
    M = M2;
    if (change < 1e-12 || pts >= 256) break;
    pts *= 2;
  }
  return M / spectral_norm(M);
}

Matrix gen_fd_inverse(Index m, Index n) {
  Index g = 2;
  while (g * g < m + n) ++g;
  const Index N = g * g;
  // 5-point second-difference operator with Dirichlet boundary.
  Matrix A = Matrix::Zero(N, N);
  for (Index x = 0; x < g; ++x)
    for (Index y = 0; y < g; ++y) {
      const Index p = x * g + y;
      A(p, p) = 4.0;
      if (x > 0) A(p, p - g) = -1.0;
      if (x + 1 < g) A(p, p + g) = -1.0;
      if (y > 0) A(p, p - 1) = -1.0;
      if (y + 1 < g) A(p, p + 1) = -1.0;
    }
  Matrix Inv = A.inverse();
  return Inv.topRightCorner(m, n);
}

LsrFamily lsr_family_from_string(const std::string& s) {
  if (s == "gaussian") return LsrFamily::Gaussian;
  if (s == "illcond") return LsrFamily::IllCond;
  if (s == "semicoherent") return LsrFamily::SemiCoherent;
  if (s == "coherent") return LsrFamily::Coherent;
  throw std::invalid_argument("unknown lsr family: " + s);
}

LsrProblem gen_lsr_family(LsrFamily family, Index m, Index n, Rng& rng) {
  if (m <= n) throw std::invalid_argument("gen_lsr_family: need m > n");
  Matrix A;
  switch (family) {
    case LsrFamily::Gaussian:
      A = rng.gaussian_matrix(m, n);
      break;
    case LsrFamily::IllCond: {
      // Leading singular values 10^4, 10^3, ..., 10^-9, tail 1e-10.
      Vector sigma(n);
      for (Index j = 0; j < n; ++j)
        sigma(j) = (j < 14) ? std::pow(10.0, 4 - static_cast<int>(j)) : 1e-10;
      A = random_orthonormal(m, n, rng) * sigma.asDiagonal() *
          random_orthonormal(n, n, rng).transpose();
      break;
    }
    case LsrFamily::SemiCoherent: {
      if (n % 2 != 0) throw std::invalid_argument("semicoherent: n must be even");
      A = Matrix::Zero(m, n);
      A.topLeftCorner(m - n / 2, n / 2) = rng.gaussian_matrix(m - n / 2, n / 2);
      for (Index i = 0; i < n / 2; ++i) A(m - n / 2 + i, n / 2 + i) = rng.sign();
      break;
    }
    case LsrFamily::Coherent: {
      A = Matrix::Zero(m, n);
      for (Index i = 0; i < n; ++i) A(i, i) = rng.sign();
      break;
    }
  }
  LsrProblem p;
  p.A = std::move(A);
  Vector x0 = rng.gaussian_vector(n);
  p.b = p.A * x0 + 0.01 * rng.gaussian_vector(m);
  return p;
}

double coherence(const Matrix& A) {
  if (A.rows() < A.cols()) throw std::invalid_argument("coherence: need m >= n");
  const Svd f = svd(A);
  // Only directions carrying nonzero singular values count.
  Index rho = 0;
  while (rho < f.sigma.size() && f.sigma(rho) > 1e-12 * f.sigma(0)) ++rho;
  return f.S.leftCols(rho).rowwise().squaredNorm().maxCoeff();
}

Matrix gen_delta(Index m, Index n, Index i, Index j) {
  Matrix M = Matrix::Zero(m, n);
  M(i, j) = 1.0;
  return M;
}

Matrix gen_shifted_delta(Index m, Index n, Index i, Index j) {
  return gen_delta(m, n, i, j) - Matrix::Constant(m, n, 0.5);
}

namespace {

Matrix kernel_on_grid(Index m, Index n, double (*k)(double, double)) {
  Matrix M(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
      const double y = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
      M(i, j) = k(x, y);
    }
  return M;
}

double k_gravity(double x, double y) {
  const double d = x - y;
  return std::pow(1.0 + d * d, -1.5);
}

double k_shaw(double x, double y) {
  const double u = std::numbers::pi * (std::sin(x - 0.5) + std::sin(y - 0.5));
  if (std::abs(u) < 1e-12) return 1.0;
  const double s = std::sin(u) / u;
  return s * s;
}

double k_hilbert(double x, double y) { return 1.0 / (x + y + 1.0); }

}  // namespace

Matrix gravity_kernel(Index m, Index n) { return kernel_on_grid(m, n, k_gravity); }
Matrix shaw_kernel(Index m, Index n) { return kernel_on_grid(m, n, k_shaw); }
Matrix hilbert_kernel(Index m, Index n) { return kernel_on_grid(m, n, k_hilbert); }

Matrix cauchy_kernel(Index n) {
  Matrix M(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      M(i, j) = 1.0 / (static_cast<double>(i) + 0.5 - static_cast<double>(j));
  return M;
}

Matrix InputSpec::make() const {
  Rng rng(seed);
  if (family == "svd-profile") return gen_svd_profile(n, r, rng);
  if (family == "factor-gaussian") return gen_factor_gaussian(m ? m : n, n, r, noise, rng);
  if (family == "laplacian") return gen_laplacian(n);
  if (family == "fd-inverse") return gen_fd_inverse(m, n);
  if (family == "gravity") return gravity_kernel(m ? m : n, n);
  if (family == "shaw") return shaw_kernel(m ? m : n, n);
  if (family == "hilbert") return hilbert_kernel(m ? m : n, n);
  if (family == "cauchy") return cauchy_kernel(n);
  throw std::invalid_argument("unknown input family: " + family);
}

nlohmann::json InputSpec::to_json() const {
  return {{"family", family}, {"m", m}, {"n", n}, {"r", r}, {"noise", noise}, {"seed", seed}};
}

InputSpec InputSpec::from_json(const nlohmann::json& j) {
  InputSpec s;
  s.family = j.at("family").get<std::string>();
  s.m = j.value("m", Index(0));
  s.n = j.at("n").get<Index>();
  s.r = j.value("r", Index(0));
  s.noise = j.value("noise", 0.0);
  s.seed = j.value("seed", std::uint64_t(0));
  return s;
}

}  // namespace slra
