#include "irsbeam/rng.hpp"

#include <cmath>
#include <numbers>

namespace irsbeam {

namespace {
constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

uint64_t substream_seed(uint64_t seed, uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (0x6a09e667f3bcc909ULL + index));
}

double GaussianStream::uniform_open() {
  return static_cast<double>((engine_() >> 11) + 1) * kInv53;
}

double GaussianStream::uniform_half_open() {
  return static_cast<double>(engine_() >> 11) * kInv53;
}

std::complex<double> GaussianStream::complex_normal() {
  const double u1 = uniform_open();
  const double u2 = uniform_half_open();
  const double radius = std::sqrt(-std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace irsbeam
