#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace bhp {

/// Identifier written into every output that depends on random draws.
inline constexpr std::string_view kGeneratorId = "splitmix64-counter-v1";

/// Counter-based view of the SplitMix64 sequence: at(n) is the (n+1)-th
/// output of a sequential SplitMix64 generator seeded with `seed`. Any
/// position can be computed independently, so parallel consumers that index
/// by draw number reproduce the serial stream exactly.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  constexpr std::uint64_t at(std::uint64_t n) const noexcept {
    std::uint64_t z = seed_ + (n + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform(std::uint64_t n) const noexcept {
    return (static_cast<double>(at(n) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on positions n and n + 1.
  double normal(std::uint64_t n) const noexcept {
    const double u1 = uniform(n);
    const double u2 = uniform(n + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace bhp
