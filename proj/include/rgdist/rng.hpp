#pragma once
// Seeding and uniform helpers. Every random quantity in the library derives
// from one 64-bit seed through counter-keyed sub-streams, so results never
// depend on scheduling or on the number of worker threads.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rgdist {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Sub-seed for the stream identified by (seed, keys...).
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> keys = {}) {
  return Engine{derive_seed(seed, keys)};
}

/// Uniform on [0,1) with 53 random bits.
inline double uniform01(Engine& g) noexcept {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform on the open interval (0,1).
inline double uniform_open(Engine& g) noexcept {
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

/// Stateless uniform on [0,1) keyed by (seed, a, b); used where a value must
/// be reproducible independent of enumeration order.
constexpr double keyed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  return static_cast<double>(derive_seed(seed, {a, b}) >> 11) * 0x1.0p-53;
}

}  // namespace rgdist
