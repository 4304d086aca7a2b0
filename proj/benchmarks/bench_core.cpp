#include <benchmark/benchmark.h>

#include "ghap/gmr.hpp"
#include "ghap/kdtree.hpp"
#include "ghap/metrics.hpp"
#include "ghap/pipeline.hpp"
#include "ghap/splat_io.hpp"
#include "ghap/synth.hpp"

#include <sstream>

using namespace ghap;

namespace {

GaussianMixture scene_3d(std::size_t n, std::uint64_t seed) {
    SynthSpec spec = SynthSpec::defaults(3);
    spec.components = n;
    spec.seed = seed;
    return synth_mixture(spec);
}

void BM_Cost(benchmark::State& state) {
    const GaussianMixture m = scene_3d(2, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cost(m.components[0], m.components[1]));
    }
}
BENCHMARK(BM_Cost);

void BM_Assign(benchmark::State& state) {
    const GaussianMixture m = scene_3d(static_cast<std::size_t>(state.range(0)), 2);
    const auto centers = initialize_centers(m, state.range(0) / 20, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(assign(m, centers));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Assign)->Range(256, 4096)->Complexity(benchmark::oN);

void BM_Reduce(benchmark::State& state) {
    const GaussianMixture m = scene_3d(static_cast<std::size_t>(state.range(0)), 4);
    ReductionConfig config;
    config.m = static_cast<std::size_t>(state.range(0)) / 20;
    config.seed = 5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(reduce(m, config));
    }
}
BENCHMARK(BM_Reduce)->Arg(1000)->Arg(2000);

void BM_BuildPartition(benchmark::State& state) {
    const GaussianMixture m = scene_3d(static_cast<std::size_t>(state.range(0)), 6);
    std::vector<Eigen::VectorXd> centers;
    for (const auto& c : m.components) {
        centers.push_back(c.mean);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_partition(centers, 1000));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildPartition)->Range(8192, 131072)->Complexity();

void BM_Compact(benchmark::State& state) {
    const GaussianMixture m = scene_3d(static_cast<std::size_t>(state.range(0)), 7);
    CompactionConfig config;
    config.retention_ratio = 0.05;
    config.block_capacity = 1000;
    config.seed = 8;
    for (auto _ : state) {
        benchmark::DoNotOptimize(compact(m, config));
    }
}
BENCHMARK(BM_Compact)->Arg(20000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_CovarianceCodec(benchmark::State& state) {
    const GaussianMixture m = scene_3d(1, 9);
    const Eigen::Matrix3d cov = m.components[0].covariance;
    for (auto _ : state) {
        auto [log_scale, quat] = encode_covariance(cov);
        benchmark::DoNotOptimize(decode_covariance(log_scale, quat));
    }
}
BENCHMARK(BM_CovarianceCodec);

void BM_WriteSplats(benchmark::State& state) {
    GaussianMixture m = scene_3d(static_cast<std::size_t>(state.range(0)), 10);
    for (auto& c : m.components) {
        Appearance a;
        a.opacity_logit = static_cast<float>(opacity_logit(c.weight));
        c.appearance = a;
    }
    for (auto _ : state) {
        std::ostringstream out;
        write_splats(out, m);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_WriteSplats)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_DensityGrid(benchmark::State& state) {
    SynthSpec spec = SynthSpec::defaults(2);
    spec.components = 1000;
    spec.seed = 11;
    const GaussianMixture m = synth_mixture(spec);
    const Region region = default_region(m, m, 3.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(density_grid(m, region, static_cast<int>(state.range(0))));
    }
}
BENCHMARK(BM_DensityGrid)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
