#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace peerlab {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive hash of a seed and a key path, e.g. derive_seed(base, {n, rep}).
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix64(base);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

// Sub-stream tags used inside one replicate.
enum class Stream : std::uint64_t { Graph = 1, Covariates = 2, Noise = 3 };

constexpr std::uint64_t stream_seed(std::uint64_t rep_seed, Stream s) noexcept {
  return derive_seed(rep_seed, {static_cast<std::uint64_t>(s)});
}

}  // namespace peerlab
