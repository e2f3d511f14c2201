#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace levydc {

using Engine = std::mt19937_64;

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

}  // namespace detail

/// Node of a deterministic seed tree. Children are derived by hashing, so a substream depends
/// only on its path from the root (master seed -> alpha -> loop -> trajectory -> purpose) and
/// never on the order in which work units are scheduled.
class SeedNode {
 public:
  constexpr explicit SeedNode(std::uint64_t key) : key_(detail::splitmix64(key)) {}

  constexpr SeedNode child(std::uint64_t index) const {
    return SeedNode(raw{}, detail::splitmix64(key_ ^ detail::splitmix64(index + 0x632be59bd9b4e019ULL)));
  }
  constexpr SeedNode child(std::string_view label) const {
    return SeedNode(raw{}, detail::splitmix64(key_ + detail::hash_label(label)));
  }

  constexpr std::uint64_t key() const { return key_; }

  Engine engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32),
                      0x4c455659u};
    return Engine(seq);
  }

 private:
  struct raw {};
  constexpr SeedNode(raw, std::uint64_t key) : key_(key) {}
  std::uint64_t key_;
};

/// Uniform draw on the open interval (0, 1).
template <class URBG>
double open_uniform(URBG& rng) {
  for (;;) {
    const double u = std::generate_canonical<double, std::numeric_limits<double>::digits>(rng);
    if (u > 0.0 && u < 1.0) return u;
  }
}

template <class URBG>
double standard_exponential(URBG& rng) {
  return -std::log1p(-open_uniform(rng));
}

}  // namespace levydc
