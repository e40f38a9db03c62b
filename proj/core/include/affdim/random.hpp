#pragma once

#include <cstdint>
#include <random>

#include "affdim/linalg.hpp"

namespace affdim {

/// SplitMix64 finaliser; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

/// Seeded generator with portable uniform draws.  Independent sub-streams are
/// obtained with derive(), so results never depend on scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Generator for stream `stream` of this seed (stateless in *this).
  Rng derive(std::uint64_t stream) const { return Rng(mix_seed(seed_ ^ mix_seed(stream + 0x9e3779b97f4a7c15ULL))); }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal() { return normal_(engine_); }

  /// d x k matrix with i.i.d. standard normal entries.
  Matrix gaussian(int rows, int cols);
  /// Haar-random orthonormal d x k frame.
  Matrix random_frame(int d, int k);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace affdim
