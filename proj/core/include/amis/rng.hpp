#pragma once

#include <cstdint>
#include <limits>

namespace amis {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Hashes (seed, a, b) to a stream key.
std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept;

// Counter-based generator: the k-th output of a stream is mix64(key + k*gamma),
// so any (seed, iteration, particle) substream can be opened independently of
// every other one. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) noexcept
      : key_(derive_key(seed, stream, substream)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on the open interval (0, 1).
  double uniform() noexcept;

  // Standard normal, Box-Muller. Implemented here rather than with
  // std::normal_distribution so that draws do not depend on the standard
  // library vendor.
  double normal() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace amis
