#pragma once

#include "ghap/mixture.hpp"

#include <cstdint>
#include <cstddef>
#include <vector>

namespace ghap {

enum class InitStrategy {
    weighted_sample,  // sample m components without replacement, P(i) ~ weight_i
    provided_centers, // use ReductionConfig::initial_centers as-is
};

enum class EmptyClusterPolicy {
    reseed_worst, // move the costliest assigned component into the empty cluster
    drop,         // remove the empty cluster; the output may have fewer than m
};

struct ReductionConfig {
    std::size_t m = 1;
    int max_iterations = 50;
    std::uint64_t seed = 0;
    InitStrategy init_strategy = InitStrategy::weighted_sample;
    EmptyClusterPolicy empty_cluster_policy = EmptyClusterPolicy::reseed_worst;
    std::vector<GaussianPrimitive> initial_centers; // used by provided_centers
};

/// Output of one reduction run. `reduced` holds the cluster barycenters with
/// aggregated weights; `assignments[i]` is the cluster index of input
/// component i (equivalently the support of the optimal transport plan:
/// component i ships its whole mass to cluster assignments[i]).
struct ReductionResult {
    GaussianMixture reduced;
    std::vector<std::size_t> assignments;
    std::vector<double> ctd_trace; // divergence at each assignment pass
    int iterations = 0;
    std::size_t cost_evaluations = 0;
    bool converged = false;
};

struct AssignResult {
    std::vector<std::size_t> assignments;
    std::vector<double> contributions; // per-component weight * min cost
    double ctd = 0.0;
    std::size_t cost_evaluations = 0;
};

/// Samples m distinct components without replacement, probability
/// proportional to weight, deterministic per seed. Centers copy the sampled
/// (mean, covariance, weight). Throws when m > n or m == 0.
std::vector<GaussianPrimitive> initialize_centers(const GaussianMixture& mixture,
                                                  std::size_t m, std::uint64_t seed);

/// Nearest-center assignment under the mean/covariance cost; ties go to the
/// lowest center index. ctd = sum_i weight_i * min_j cost(i, j), accumulated
/// at 64-bit in component order.
AssignResult assign(const GaussianMixture& mixture,
                    const std::vector<GaussianPrimitive>& centers);

/// Closed-form barycenters: per-cluster weight-weighted averages of means and
/// covariances. Every cluster in [0, m) must be non-empty (the reducer applies
/// its empty-cluster policy first). The barycenter weight is the cluster mass.
std::vector<GaussianPrimitive> update_barycenters(const GaussianMixture& mixture,
                                                  const std::vector<std::size_t>& assignments,
                                                  std::size_t m);

/// Alternates assignment and barycenter updates until the assignments reach a
/// fixed point or max_iterations passes complete. The divergence trace is
/// non-increasing; cluster masses conserve the input mass exactly up to
/// 64-bit summation. Non-convergence is reported via `converged`, never an
/// error. Reduced components carry no appearance payload.
ReductionResult reduce(const GaussianMixture& mixture, const ReductionConfig& config);

/// Divergence from `mixture` to a fixed reduced mixture: each component
/// transports its full mass to its cheapest counterpart, which is the optimal
/// plan when the target marginals are free.
double ctd_to(const GaussianMixture& mixture, const GaussianMixture& reduced);

} // namespace ghap
