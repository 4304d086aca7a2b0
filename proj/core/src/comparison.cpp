#include "ghap/comparison.hpp"

#include "ghap/baselines.hpp"
#include "ghap/errors.hpp"
#include "ghap/gmr.hpp"
#include "ghap/rng.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <sstream>

namespace ghap {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Salt decorrelating the subsampling stream from the scene-generation stream.
constexpr std::uint64_t kSubsampleSalt = 0x5ab5a3715eed0401ULL;

MethodMetrics score(const std::string& method, const GaussianMixture& original,
                    const GaussianMixture& candidate, const DensityField& field_original,
                    const Region& region, int resolution, double wall_ms) {
    MethodMetrics m;
    m.method = method;
    m.output_count = candidate.size();
    const DensityField field = density_grid(candidate, region, resolution);
    m.density_l2 = field_rms_diff(field_original, field);
    m.ctd = ctd_to(original, candidate);
    m.wall_ms = wall_ms;
    return m;
}

} // namespace

ComparisonReport run_comparison(const ComparisonConfig& config) {
    if (config.seeds.empty()) {
        throw NumericError("run_comparison: need at least one seed");
    }
    ComparisonReport report;
    report.config = config;

    for (const std::uint64_t seed : config.seeds) {
        SynthSpec spec = config.synth;
        spec.seed = seed;
        const GaussianMixture scene = synth_mixture(spec);

        SeedResult cell;
        cell.seed = seed;
        cell.input_count = scene.size();

        const Region region = default_region(scene, scene, 3.0);
        const DensityField field_original =
            density_grid(scene, region, config.grid_resolution);

        CompactionConfig cc;
        cc.retention_ratio = config.retention_ratio;
        cc.block_capacity = config.block_capacity;
        cc.seed = seed;
        cc.parallelism = config.parallelism;
        cc.max_iterations = config.max_iterations;

        const auto t_ghap = Clock::now();
        auto [ghap_out, ghap_report] = compact(scene, cc);
        const double ghap_ms = ms_since(t_ghap);
        MethodMetrics ghap_metrics = score("ghap", scene, ghap_out, field_original,
                                           region, config.grid_resolution, ghap_ms);
        ghap_metrics.cost_evaluations = ghap_report.cost_evaluations;
        ghap_metrics.per_iteration_cost_evaluations =
            ghap_report.per_iteration_cost_evaluations;
        cell.methods.push_back(std::move(ghap_metrics));

        const std::size_t matched = ghap_out.size();
        const std::uint64_t sub_seed = hash_block_seed(seed, kSubsampleSalt);

        auto t0 = Clock::now();
        const GaussianMixture pruned = prune_by_weight(scene, matched, true);
        cell.methods.push_back(score("prune", scene, pruned, field_original, region,
                                     config.grid_resolution, ms_since(t0)));

        t0 = Clock::now();
        const GaussianMixture pruned_raw = prune_by_weight(scene, matched, false);
        cell.methods.push_back(score("prune-raw", scene, pruned_raw, field_original,
                                     region, config.grid_resolution, ms_since(t0)));

        t0 = Clock::now();
        const GaussianMixture sampled = random_subsample(scene, matched, sub_seed, true);
        cell.methods.push_back(score("random", scene, sampled, field_original, region,
                                     config.grid_resolution, ms_since(t0)));

        t0 = Clock::now();
        const GaussianMixture sampled_raw = random_subsample(scene, matched, sub_seed, false);
        cell.methods.push_back(score("random-raw", scene, sampled_raw, field_original,
                                     region, config.grid_resolution, ms_since(t0)));

        report.seeds.push_back(std::move(cell));
    }

    // Depth sweep on the first seed's scene: smaller capacities -> deeper
    // trees -> less per-iteration assignment work.
    std::vector<std::size_t> capacities = config.sweep_capacities;
    if (capacities.empty()) {
        capacities = {config.block_capacity * 2, config.block_capacity,
                      std::max<std::size_t>(2, config.block_capacity / 2),
                      std::max<std::size_t>(2, config.block_capacity / 4)};
    }
    {
        SynthSpec spec = config.synth;
        spec.seed = config.seeds.front();
        const GaussianMixture scene = synth_mixture(spec);
        const Region region = default_region(scene, scene, 3.0);
        const DensityField field_original =
            density_grid(scene, region, config.grid_resolution);
        for (const std::size_t capacity : capacities) {
            CompactionConfig cc;
            cc.retention_ratio = config.retention_ratio;
            cc.block_capacity = capacity;
            cc.seed = config.seeds.front();
            cc.parallelism = config.parallelism;
            cc.max_iterations = config.max_iterations;
            const auto t0 = Clock::now();
            auto [out, creport] = compact(scene, cc);
            SweepPoint point;
            point.block_capacity = capacity;
            point.depth = creport.depth;
            point.per_iteration_cost_evaluations = creport.per_iteration_cost_evaluations;
            point.total_ctd = creport.total_ctd;
            point.wall_ms = ms_since(t0);
            const DensityField field = density_grid(out, region, config.grid_resolution);
            point.density_l2 = field_rms_diff(field_original, field);
            report.depth_sweep.push_back(point);
        }
    }
    return report;
}

namespace {

nlohmann::json config_to_json_obj(const ComparisonConfig& c) {
    nlohmann::json doc;
    doc["dim"] = c.synth.dim;
    doc["components"] = c.synth.components;
    doc["box_lo"] = std::vector<double>(c.synth.box_lo.data(),
                                        c.synth.box_lo.data() + c.synth.box_lo.size());
    doc["box_hi"] = std::vector<double>(c.synth.box_hi.data(),
                                        c.synth.box_hi.data() + c.synth.box_hi.size());
    doc["cov_scale"] = c.synth.cov_scale;
    doc["cov_anisotropy"] = c.synth.cov_anisotropy;
    doc["weight_law"] =
        c.synth.weight_law == WeightLaw::uniform ? "uniform" : "dirichlet-like";
    doc["retention_ratio"] = c.retention_ratio;
    doc["block_capacity"] = c.block_capacity;
    doc["seeds"] = c.seeds;
    doc["grid_resolution"] = c.grid_resolution;
    doc["max_iterations"] = c.max_iterations;
    doc["sweep_capacities"] = c.sweep_capacities;
    return doc;
}

} // namespace

std::string comparison_to_json(const ComparisonReport& report, bool include_timings) {
    nlohmann::json doc;
    doc["config"] = config_to_json_obj(report.config);
    doc["seeds"] = nlohmann::json::array();
    for (const auto& cell : report.seeds) {
        nlohmann::json methods = nlohmann::json::array();
        for (const auto& m : cell.methods) {
            nlohmann::json entry = {
                {"method", m.method},
                {"output_count", m.output_count},
                {"density_l2_error", m.density_l2},
                {"ctd", m.ctd},
                {"cost_evaluations", m.cost_evaluations},
                {"per_iteration_cost_evaluations", m.per_iteration_cost_evaluations},
            };
            if (include_timings) {
                entry["wall_ms"] = m.wall_ms;
            }
            methods.push_back(std::move(entry));
        }
        doc["seeds"].push_back({{"seed", cell.seed},
                                {"input_count", cell.input_count},
                                {"methods", std::move(methods)}});
    }
    doc["depth_sweep"] = nlohmann::json::array();
    for (const auto& p : report.depth_sweep) {
        nlohmann::json entry = {
            {"block_capacity", p.block_capacity},
            {"depth", p.depth},
            {"per_iteration_cost_evaluations", p.per_iteration_cost_evaluations},
            {"density_l2_error", p.density_l2},
            {"total_ctd", p.total_ctd},
        };
        if (include_timings) {
            entry["wall_ms"] = p.wall_ms;
        }
        doc["depth_sweep"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

std::string comparison_to_csv(const ComparisonReport& report) {
    std::ostringstream out;
    out << "seed,method,input_count,output_count,density_l2_error,ctd,"
           "cost_evaluations,per_iteration_cost_evaluations\n";
    char buf[64];
    for (const auto& cell : report.seeds) {
        for (const auto& m : cell.methods) {
            out << cell.seed << "," << m.method << "," << cell.input_count << ","
                << m.output_count << ",";
            std::snprintf(buf, sizeof(buf), "%.17g", m.density_l2);
            out << buf << ",";
            std::snprintf(buf, sizeof(buf), "%.17g", m.ctd);
            out << buf << "," << m.cost_evaluations << ","
                << m.per_iteration_cost_evaluations << "\n";
        }
    }
    return out.str();
}

ComparisonConfig comparison_config_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("bad comparison config: ") + e.what());
    }
    ComparisonConfig config;
    try {
        const int dim = doc.value("dim", config.synth.dim);
        config.synth = SynthSpec::defaults(dim);
        config.synth.components = doc.value("components", config.synth.components);
        if (doc.contains("box_lo")) {
            const auto lo = doc["box_lo"].get<std::vector<double>>();
            config.synth.box_lo = Eigen::Map<const Eigen::VectorXd>(
                lo.data(), static_cast<Eigen::Index>(lo.size()));
        }
        if (doc.contains("box_hi")) {
            const auto hi = doc["box_hi"].get<std::vector<double>>();
            config.synth.box_hi = Eigen::Map<const Eigen::VectorXd>(
                hi.data(), static_cast<Eigen::Index>(hi.size()));
        }
        config.synth.cov_scale = doc.value("cov_scale", config.synth.cov_scale);
        config.synth.cov_anisotropy =
            doc.value("cov_anisotropy", config.synth.cov_anisotropy);
        if (doc.contains("weight_law")) {
            const std::string law = doc["weight_law"].get<std::string>();
            if (law == "uniform") {
                config.synth.weight_law = WeightLaw::uniform;
            } else if (law == "dirichlet-like") {
                config.synth.weight_law = WeightLaw::dirichlet_like;
            } else {
                throw IoError("bad comparison config: unknown weight_law '" + law + "'");
            }
        }
        config.retention_ratio = doc.value("retention_ratio", config.retention_ratio);
        config.block_capacity = doc.value("block_capacity", config.block_capacity);
        if (doc.contains("seeds")) {
            config.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
        }
        config.grid_resolution = doc.value("grid_resolution", config.grid_resolution);
        config.max_iterations = doc.value("max_iterations", config.max_iterations);
        if (doc.contains("sweep_capacities")) {
            config.sweep_capacities =
                doc["sweep_capacities"].get<std::vector<std::size_t>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("bad comparison config: ") + e.what());
    }
    return config;
}

std::string comparison_config_to_json(const ComparisonConfig& config) {
    return config_to_json_obj(config).dump(2) + "\n";
}

} // namespace ghap
