#include "ghap/baselines.hpp"

#include "ghap/errors.hpp"
#include "ghap/rng.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace ghap {

namespace {

GaussianMixture keep_indices(const GaussianMixture& mixture,
                             std::vector<std::size_t> keep, bool renormalize) {
    std::sort(keep.begin(), keep.end());
    GaussianMixture out;
    out.dim = mixture.dim;
    out.components.reserve(keep.size());
    double kept_mass = 0.0;
    for (const std::size_t i : keep) {
        out.components.push_back(mixture.components[i]);
        kept_mass += mixture.components[i].weight;
    }
    if (renormalize && kept_mass > 0.0) {
        const double scale = mixture.total_mass() / kept_mass;
        for (auto& c : out.components) {
            c.weight *= scale;
        }
    }
    return out;
}

} // namespace

GaussianMixture prune_by_weight(const GaussianMixture& mixture, std::size_t m,
                                bool renormalize) {
    if (m > mixture.size()) {
        throw NumericError("prune_by_weight: m=" + std::to_string(m) + " exceeds n=" +
                           std::to_string(mixture.size()));
    }
    std::vector<std::size_t> order(mixture.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return mixture.components[a].weight > mixture.components[b].weight;
    });
    order.resize(m);
    return keep_indices(mixture, std::move(order), renormalize);
}

GaussianMixture random_subsample(const GaussianMixture& mixture, std::size_t m,
                                 std::uint64_t seed, bool renormalize) {
    if (m > mixture.size()) {
        throw NumericError("random_subsample: m=" + std::to_string(m) + " exceeds n=" +
                           std::to_string(mixture.size()));
    }
    std::vector<std::size_t> pool(mixture.size());
    std::iota(pool.begin(), pool.end(), 0);
    Rng rng(seed);
    // Partial Fisher-Yates: the first m slots become the sample.
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    return keep_indices(mixture, std::move(pool), renormalize);
}

} // namespace ghap
