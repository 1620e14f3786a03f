#pragma once

#include <cstddef>
#include <cstdint>

#include "manpg/dense_matrix.hpp"

namespace manpg {

/// xoshiro256++ generator seeded through splitmix64, with normal deviates
/// from the Marsaglia polar method. The algorithm identity is fixed so that
/// every seeded fixture and benchmark replays exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double next_uniform();  // [0, 1)
  double next_normal();   // N(0, 1)

  /// rows×cols matrix of i.i.d. N(0, sigma²) entries, filled column-major.
  DenseMatrix normal_matrix(std::size_t rows, std::size_t cols, double sigma = 1.0);

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace manpg
