#include "amis/rng.hpp"

#include <cmath>
#include <numbers>

namespace amis {

std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t k = mix64(seed + 0x243f6a8885a308d3ULL);
  k = mix64(k ^ (a * 0x9e3779b97f4a7c15ULL + 0x13198a2e03707344ULL));
  k = mix64(k ^ (b * 0xc2b2ae3d27d4eb4fULL + 0xa4093822299f31d0ULL));
  return k;
}

double CounterRng::uniform() noexcept {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

}  // namespace amis
