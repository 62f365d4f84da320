#pragma once

#include <string>

#include "json.hpp"
#include "slra/linalg.hpp"
#include "slra/lsr.hpp"
#include "slra/rng.hpp"

namespace slra {

/// Orthogonal-factor matrix with singular values 1/j for j <= r and 1e-10
/// beyond, so ||M|| = 1 and kappa(M) = 1e10.
Matrix gen_svd_profile(Index n, Index r, Rng& rng);

/// G1 * G2 + noise * G3 for Gaussian factors (m x r) (r x n) (m x n).
Matrix gen_factor_gaussian(Index m, Index n, Index r, double noise, Rng& rng);

/// Discretized single-layer potential between two circles: entry (i, j) is
/// the arc integral of log|2 w^i - y| over the j-th arc of the unit circle,
/// scaled so the spectral norm is 1.
Matrix gen_laplacian(Index n);

/// Off-diagonal m x n block of the dense inverse of a 2-D grid
/// second-difference operator (Dirichlet boundary).
Matrix gen_fd_inverse(Index m, Index n);

enum class LsrFamily { Gaussian, IllCond, SemiCoherent, Coherent };
LsrFamily lsr_family_from_string(const std::string& s);

/// A per family; b = A x0 + 0.01 * Gaussian noise.
LsrProblem gen_lsr_family(LsrFamily family, Index m, Index n, Rng& rng);

/// Maximum squared row norm of the left singular factor, in [n/m, 1].
double coherence(const Matrix& A);

Matrix gen_delta(Index m, Index n, Index i, Index j);
Matrix gen_shifted_delta(Index m, Index n, Index i, Index j);

// Discretized smooth kernels on [0,1]^2 (offline stand-ins for the usual
// inverse-problem test collections).
Matrix gravity_kernel(Index m, Index n);   // (1 + (x-y)^2)^(-3/2)
Matrix shaw_kernel(Index m, Index n);      // sinc^2
Matrix hilbert_kernel(Index m, Index n);   // 1/(x + y + 1)

/// Cauchy matrix 1/(x_i - y_j) with interleaved nodes x_i = i + 1/2, y_j = j:
/// diagonal blocks stay bounded while off-diagonal blocks are numerically
/// low-rank, the structure the HSS builder targets.
Matrix cauchy_kernel(Index n);

/// Family tag + parameters, JSON round-trippable, with a dispatcher.
struct InputSpec {
  std::string family;
  Index m = 0, n = 0, r = 0;
  double noise = 0;
  std::uint64_t seed = 0;

  Matrix make() const;
  nlohmann::json to_json() const;
  static InputSpec from_json(const nlohmann::json& j);
};

}  // namespace slra
