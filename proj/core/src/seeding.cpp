#include "wvabench/seeding.hpp"

namespace wvabench {

std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) noexcept {
    return splitmix64(master_seed + (trial_index + 1) * 0x9E3779B97F4A7C15ULL);
}

}  // namespace wvabench
