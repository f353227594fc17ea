#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "qchain/numkernel.hpp"

namespace qchain {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for an independent substream keyed by a parent seed and a path of indices.
std::uint64_t substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

/// Matrix with i.i.d. standard complex Gaussian entries (real and imaginary parts N(0, 1/2)).
Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng);

double uniform01(Rng& rng);

}  // namespace qchain
