#pragma once

#include "ghap/metrics.hpp"
#include "ghap/pipeline.hpp"
#include "ghap/synth.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ghap {

/// One experiment family: a synthetic scene spec, the compaction operating
/// point, the seeds to sweep, and the depth-sweep capacities.
struct ComparisonConfig {
    SynthSpec synth = SynthSpec::defaults(2);
    double retention_ratio = 0.05;
    std::size_t block_capacity = 250;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    int grid_resolution = 256;
    int max_iterations = 50;
    unsigned parallelism = 0;
    std::vector<std::size_t> sweep_capacities; // empty: {2s, s, s/2, s/4}
};

/// Metrics for one (seed, method) cell. Baselines appear twice: with the
/// kept mass renormalized to the input mass (the default comparison) and raw.
struct MethodMetrics {
    std::string method;
    std::size_t output_count = 0;
    double density_l2 = 0.0;
    double ctd = 0.0;
    std::size_t cost_evaluations = 0;               // reducer work (ghap only)
    std::size_t per_iteration_cost_evaluations = 0; // sum_k size_k*m_k (ghap only)
    double wall_ms = 0.0;
};

struct SeedResult {
    std::uint64_t seed = 0;
    std::size_t input_count = 0;
    std::vector<MethodMetrics> methods;
};

struct SweepPoint {
    std::size_t block_capacity = 0;
    int depth = 0;
    std::size_t per_iteration_cost_evaluations = 0;
    double density_l2 = 0.0;
    double total_ctd = 0.0;
    double wall_ms = 0.0;
};

struct ComparisonReport {
    ComparisonConfig config;
    std::vector<SeedResult> seeds;
    std::vector<SweepPoint> depth_sweep;
};

/// For every seed: synthesize the scene, compact it, match the baselines to
/// the compacted count, and score everything against the original by
/// grid-mode density RMS and by divergence. Then sweep the KD depth on the
/// first seed's scene. Fully deterministic for a fixed config.
ComparisonReport run_comparison(const ComparisonConfig& config);

/// Stable-schema serializations. Wall-times are omitted unless requested so
/// the default documents are byte-reproducible.
std::string comparison_to_json(const ComparisonReport& report, bool include_timings = false);
std::string comparison_to_csv(const ComparisonReport& report);

/// Config I/O for the CLI: missing keys fall back to the defaults above.
ComparisonConfig comparison_config_from_json(const std::string& text);
std::string comparison_config_to_json(const ComparisonConfig& config);

} // namespace ghap
