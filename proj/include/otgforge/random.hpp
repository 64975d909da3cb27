#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace otgforge {

// All seeded randomness goes through mt19937_64 with hand-rolled distribution
// helpers so streams are identical across standard library implementations.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

// Uniform integer in [0, n) by rejection sampling; n must be > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

// Standard normal via Box-Muller.
double standard_normal(Rng& rng);

// Fisher-Yates permutation of [0, n): for i = n-1 down to 1, swap i with
// uniform_below(rng, i + 1).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

// Derives an independent child seed from a parent seed and a stream tag
// (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace otgforge
