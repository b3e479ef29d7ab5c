#pragma once

#include <cstdint>
#include <random>

namespace raingen {

/// Engine used for every stochastic step. Seeded explicitly; there is no
/// global or time-based state anywhere in the library.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; bijective on 64-bit words.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;

/// Independent engine for stream `index` under `master_seed`. The result is
/// a pure function of its arguments, so scenario i draws the same numbers no
/// matter which thread generates it or in what order.
[[nodiscard]] Rng make_stream(std::uint64_t master_seed, std::uint64_t index);

}  // namespace raingen
