#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace irsbeam {

/// Derives an independent substream seed from (seed, index).
/// splitmix64 finalizer over the xor of both words; stable across platforms.
uint64_t substream_seed(uint64_t seed, uint64_t index);

/// Reproducible standard complex Gaussian stream.
///
/// Stream contract (relied on by replay files and transcript tests):
///  - the engine is std::mt19937_64 seeded directly with `seed`,
///  - each uniform consumes one engine output x; the open-interval draw is
///    ((x >> 11) + 1) * 2^-53 in (0,1], the half-open draw (x >> 11) * 2^-53
///    in [0,1),
///  - one CN(0,1) sample consumes u1 (open) then u2 (half-open) and equals
///    sqrt(-log(u1)) * exp(j*2*pi*u2).
class GaussianStream {
 public:
  explicit GaussianStream(uint64_t seed) : engine_(seed) {}

  double uniform_open();
  double uniform_half_open();
  std::complex<double> complex_normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace irsbeam
