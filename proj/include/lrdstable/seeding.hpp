#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lrdstable {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent substream seed from a master seed and a path of
/// tags (path index, replication index, ...). Pure function of its inputs.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags);

/// Bit pattern of a double, for use as a seed tag.
std::uint64_t tag_of(double value);

inline constexpr std::uint64_t kPathTag1 = 1;
inline constexpr std::uint64_t kPathTag2 = 2;

}  // namespace lrdstable
