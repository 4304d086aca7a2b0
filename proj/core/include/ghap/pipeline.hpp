#pragma once

#include "ghap/gmr.hpp"
#include "ghap/kdtree.hpp"
#include "ghap/mixture.hpp"
#include "ghap/rng.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ghap {

enum class NnMode {
    within_block, // nearest original restricted to the reduced component's block
    global_exact, // nearest original over the whole scene
};

struct CompactionConfig {
    double retention_ratio = 0.1;  // rho in (0, 1]
    std::size_t block_capacity = 1000;
    std::uint64_t seed = 0;
    unsigned parallelism = 0; // worker threads, 0 = hardware count
    NnMode nn_mode = NnMode::within_block;
    SplitAxisRule axis_rule = SplitAxisRule::largest_spread;
    int max_iterations = 50;
    EmptyClusterPolicy empty_cluster_policy = EmptyClusterPolicy::reseed_worst;
};

struct BlockReport {
    std::size_t index = 0;
    std::size_t size = 0;
    std::size_t reduced = 0;
    int iterations = 0;
    bool converged = false;
    double ctd = 0.0;
    std::size_t cost_evaluations = 0;
    double input_mass = 0.0;
    double reduced_mass = 0.0; // aggregated GMR mass, kept even after the
                               // output opacity is replaced by the neighbor's
};

struct CompactionReport {
    std::size_t input_count = 0;
    std::size_t output_count = 0;
    int depth = 0;
    double retention_ratio = 0.0;
    std::size_t block_capacity = 0;
    std::uint64_t seed = 0;
    NnMode nn_mode = NnMode::within_block;
    SplitAxisRule axis_rule = SplitAxisRule::largest_spread;
    double total_ctd = 0.0;
    std::size_t cost_evaluations = 0;
    std::size_t per_iteration_cost_evaluations = 0; // sum_k size_k * reduced_k
    std::vector<BlockReport> blocks;
    double partition_ms = 0.0;
    double reduce_ms = 0.0;
    double transfer_ms = 0.0;
};

/// Stable-schema JSON document. Wall times are only emitted when
/// `include_timings` is set; everything else is deterministic for a fixed
/// input and seed, so the default document is byte-reproducible.
std::string report_to_json(const CompactionReport& report, bool include_timings = false);

/// Blockwise compaction: KD-tree partition at capacity s, per-block reduction
/// to max(1, round(rho * block_size)) components with block seed
/// hash_block_seed(seed, k), results concatenated in block order. When every
/// input component carries an appearance payload the output gets appearance
/// (and opacity) from its nearest original; pure-geometry mixtures skip that
/// step. Output is identical for any worker count.
std::pair<GaussianMixture, CompactionReport> compact(const GaussianMixture& mixture,
                                                     const CompactionConfig& config);

/// Appearance initialization: each reduced component copies the payload and
/// activated opacity of the original whose mean is closest to its own (ties
/// to the lowest index). `reduced_per_block[k]` says how many consecutive
/// reduced components came from partition block k. Means and covariances are
/// never touched.
GaussianMixture transfer_appearance(const GaussianMixture& original,
                                    const GaussianMixture& reduced,
                                    const BlockPartition& partition,
                                    const std::vector<std::size_t>& reduced_per_block,
                                    NnMode nn_mode);

} // namespace ghap
