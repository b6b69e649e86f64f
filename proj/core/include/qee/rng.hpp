#pragma once

// Seeded generation. The engine is MT19937-64 (std::mt19937_64, whose output
// sequence is fixed by the C++ standard). Uniform and normal variates are
// derived from raw 64-bit outputs with the explicit transforms below rather
// than std:: distributions, whose algorithms are implementation-defined.
//
//   uniform   u = (x >> 11) * 2^-53                    in [0, 1)
//   normal    Box-Muller on (u1, u2), cos branch first, sin branch cached
//             z0 = sqrt(-2 ln(1 - u1)) cos(2 pi u2)
//   complex   (z_re + i z_im) / sqrt(2), so E|z|^2 = 1

#include <cstdint>
#include <optional>
#include <random>

#include "qee/linalg.hpp"

namespace qee {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [lo, hi] by rejection, no modulo bias.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  double normal();
  Complex complex_normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> cached_normal_;
};

// (X + X^dagger) / 2 with X filled row-major by complex_normal().
ComplexMatrix random_hermitian(std::size_t n, Rng& rng);
// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
// of R's diagonal moved into Q.
ComplexMatrix random_unitary(std::size_t n, Rng& rng);

}  // namespace qee
