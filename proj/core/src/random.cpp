#include "affdim/random.hpp"

namespace affdim {

std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Matrix Rng::gaussian(int rows, int cols) {
  Matrix g(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) g(r, c) = normal();
  }
  return g;
}

Matrix Rng::random_frame(int d, int k) { return orthonormalize(gaussian(d, k)); }

}  // namespace affdim
