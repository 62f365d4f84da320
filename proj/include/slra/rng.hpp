#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "slra/matrix.hpp"

namespace slra {

/// Seedable deterministic pseudorandom stream. Same seed -> bit-identical
/// draws, independent of platform (distributions are hand-rolled rather than
/// taken from <random>, whose distribution objects are not portable).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (one value per call; partner discarded
  /// to keep the draw sequence simple and reproducible).
  double gaussian();

  /// Uniform integer in [0, n).
  Index uniform_index(Index n);

  /// +1 or -1 with equal probability.
  int sign() { return (next_u64() & 1u) ? 1 : -1; }

  std::vector<Index> permutation(Index n);

  /// k distinct indices drawn uniformly from [0, n).
  std::vector<Index> distinct_indices(Index k, Index n);

  Matrix gaussian_matrix(Index rows, Index cols);
  Vector gaussian_vector(Index n);

  /// Decorrelated child stream, e.g. per-trial seeds from a master seed.
  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);
  Rng child(std::uint64_t stream) { return Rng(derive_seed(next_u64(), stream)); }

private:
  std::mt19937_64 eng_;
};

}  // namespace slra
