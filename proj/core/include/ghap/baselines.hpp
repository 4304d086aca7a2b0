#pragma once

#include "ghap/mixture.hpp"

#include <cstdint>

namespace ghap {

/// Keeps the m largest-weight components (ties to the lowest index) in their
/// original order. With `renormalize`, kept weights are scaled uniformly so
/// the total mass matches the input's. Appearance payloads ride along.
GaussianMixture prune_by_weight(const GaussianMixture& mixture, std::size_t m,
                                bool renormalize);

/// Keeps m components drawn uniformly without replacement, original order
/// preserved; deterministic per seed.
GaussianMixture random_subsample(const GaussianMixture& mixture, std::size_t m,
                                 std::uint64_t seed, bool renormalize);

} // namespace ghap
