#pragma once

#include <cstdint>
#include <random>

namespace gssd {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent stream seeds from a
/// master seed and a counter.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `index` of `master`. Depends only on the pair, so work
/// items can run in any order.
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix_seed(mix_seed(master) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

}  // namespace gssd
