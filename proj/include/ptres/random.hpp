#pragma once

#include "ptres/tensor.hpp"

#include <cstdint>
#include <random>

namespace ptres {

/// Seeded generator used by every sampler; same seed and call order give the same numbers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : eng_(seed) {}
  double normal() { return normal_(eng_); }
  double uniform() { return uniform_(eng_); }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  std::uint64_t next_seed() { return eng_(); }
  std::mt19937_64& engine() { return eng_; }

  Mat ginibre(long rows, long cols);
  /// Haar-random unitary via QR of a Ginibre matrix with the phase fix.
  Mat haar_unitary(long d);
  /// First `cols` columns of a Haar unitary of size rows.
  Mat haar_isometry(long rows, long cols);
  /// Hilbert-Schmidt-style random density matrix of the given rank.
  Mat random_density(long d, long rank = -1);

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace ptres
