#pragma once

#include <cstdint>
#include <random>

namespace wvabench {

/// Random stream used throughout. Every Monte Carlo consumer takes one of
/// these by reference; parallel callers own independent instances.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer: a bijection on 64-bit words.
std::uint64_t splitmix64(std::uint64_t z) noexcept;

/// Seed for trial `trial_index` of a run with master seed `master_seed`.
///
/// Computes splitmix64(master_seed + (trial_index + 1) * 0x9E3779B97F4A7C15).
/// The golden-ratio increment is odd, so the pre-image is injective in the
/// trial index modulo 2^64, and the finalizer is a bijection: distinct trial
/// indices under one master never collide, and distinct masters differ at
/// every fixed index. Pure integer arithmetic, so identical on every
/// platform.
std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) noexcept;

}  // namespace wvabench
