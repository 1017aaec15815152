#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string_view>

namespace spatialecon {

/// Deterministic substream derivation. A stream is identified by the user
/// seed, a fixed label naming the subsystem, and a counter (permutation,
/// draw or replication index), so results do not depend on which thread
/// consumes which stream.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                          std::uint64_t index = 0);

using Rng = std::mt19937_64;

inline Rng make_stream(std::uint64_t seed, std::string_view label,
                       std::uint64_t index = 0) {
  return Rng(derive_seed(seed, label, index));
}

/// Standard normal draw (Marsaglia polar method). The sequence depends only
/// on the engine state, not on the standard library implementation.
double standard_normal(Rng& rng);

/// Uniform integer in [0, bound) by rejection, portable across libraries.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

template <typename It>
void portable_shuffle(It first, It last, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = uniform_index(rng, i);
    std::iter_swap(first + (i - 1), first + j);
  }
}

/// Worker count: SPATIALECON_THREADS if set (>= 1), otherwise hardware
/// concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, n) over thread_count() workers with static
/// contiguous chunks. Bodies must only write to slots owned by their index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace spatialecon
