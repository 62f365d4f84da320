#include "slra/rng.hpp"

#include <cmath>
#include <numbers>

namespace slra {

double Rng::gaussian() {
  // Box-Muller; u1 kept away from 0 so log() is finite.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Index Rng::uniform_index(Index n) {
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t un = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return static_cast<Index>(x % un);
}

std::vector<Index> Rng::permutation(Index n) {
  std::vector<Index> p(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) p[static_cast<size_t>(i)] = i;
  for (Index i = n - 1; i > 0; --i)
    std::swap(p[static_cast<size_t>(i)], p[static_cast<size_t>(uniform_index(i + 1))]);
  return p;
}

std::vector<Index> Rng::distinct_indices(Index k, Index n) {
  // Partial Fisher-Yates over an index table.
  std::vector<Index> pool(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) pool[static_cast<size_t>(i)] = i;
  std::vector<Index> out;
  out.reserve(static_cast<size_t>(k));
  for (Index t = 0; t < k; ++t) {
    const Index j = t + uniform_index(n - t);
    std::swap(pool[static_cast<size_t>(t)], pool[static_cast<size_t>(j)]);
    out.push_back(pool[static_cast<size_t>(t)]);
  }
  return out;
}

Matrix Rng::gaussian_matrix(Index rows, Index cols) {
  Matrix G(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) G(i, j) = gaussian();
  return G;
}

Vector Rng::gaussian_vector(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = gaussian();
  return v;
}

std::uint64_t Rng::derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 over the combined word.
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace slra
