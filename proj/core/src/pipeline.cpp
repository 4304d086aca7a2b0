#include "ghap/pipeline.hpp"

#include "ghap/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace ghap {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

const char* nn_mode_name(NnMode mode) {
    return mode == NnMode::within_block ? "within-block" : "global-exact";
}

const char* axis_rule_name(SplitAxisRule rule) {
    return rule == SplitAxisRule::largest_spread ? "largest-spread" : "cycle";
}

std::size_t nearest_original(const GaussianMixture& original,
                             const Eigen::VectorXd& mean,
                             const std::vector<std::size_t>* block_indices) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    if (block_indices != nullptr) {
        for (const std::size_t i : *block_indices) {
            const double d = (original.components[i].mean - mean).squaredNorm();
            if (d < best) {
                best = d;
                best_i = i;
            }
        }
    } else {
        for (std::size_t i = 0; i < original.size(); ++i) {
            const double d = (original.components[i].mean - mean).squaredNorm();
            if (d < best) {
                best = d;
                best_i = i;
            }
        }
    }
    return best_i;
}

} // namespace

GaussianMixture transfer_appearance(const GaussianMixture& original,
                                    const GaussianMixture& reduced,
                                    const BlockPartition& partition,
                                    const std::vector<std::size_t>& reduced_per_block,
                                    NnMode nn_mode) {
    for (std::size_t i = 0; i < original.size(); ++i) {
        if (!original.components[i].appearance) {
            throw NumericError("transfer_appearance: component " + std::to_string(i) +
                               " has no appearance payload");
        }
    }
    if (reduced_per_block.size() != partition.blocks.size()) {
        throw NumericError("transfer_appearance: block layout mismatch");
    }

    GaussianMixture out = reduced;
    std::size_t offset = 0;
    for (std::size_t k = 0; k < reduced_per_block.size(); ++k) {
        const std::vector<std::size_t>* scope =
            nn_mode == NnMode::within_block ? &partition.blocks[k] : nullptr;
        for (std::size_t j = offset; j < offset + reduced_per_block[k]; ++j) {
            const std::size_t i = nearest_original(original, out.components[j].mean, scope);
            out.components[j].appearance = original.components[i].appearance;
            out.components[j].weight = original.components[i].weight;
        }
        offset += reduced_per_block[k];
    }
    if (offset != reduced.size()) {
        throw NumericError("transfer_appearance: block layout does not cover the reduced mixture");
    }
    return out;
}

std::pair<GaussianMixture, CompactionReport> compact(const GaussianMixture& mixture,
                                                     const CompactionConfig& config) {
    if (mixture.empty()) {
        throw NumericError("compact: empty mixture");
    }
    if (!(config.retention_ratio > 0.0) || config.retention_ratio > 1.0) {
        throw NumericError("compact: retention ratio must be in (0, 1]");
    }
    if (config.block_capacity == 0) {
        throw NumericError("compact: block capacity must be >= 1");
    }

    CompactionReport report;
    report.input_count = mixture.size();
    report.retention_ratio = config.retention_ratio;
    report.block_capacity = config.block_capacity;
    report.seed = config.seed;
    report.nn_mode = config.nn_mode;
    report.axis_rule = config.axis_rule;

    const auto t_partition = Clock::now();
    std::vector<Eigen::VectorXd> centers;
    centers.reserve(mixture.size());
    for (const auto& c : mixture.components) {
        centers.push_back(c.mean);
    }
    const BlockPartition partition =
        build_partition(centers, config.block_capacity, config.axis_rule);
    report.depth = partition.depth;
    report.partition_ms = ms_since(t_partition);

    const auto t_reduce = Clock::now();
    const std::size_t block_count = partition.blocks.size();
    std::vector<ReductionResult> results(block_count);
    std::vector<double> block_masses(block_count, 0.0);

    auto reduce_block = [&](std::size_t k) {
        const std::vector<std::size_t>& indices = partition.blocks[k];
        GaussianMixture block;
        block.dim = mixture.dim;
        block.components.reserve(indices.size());
        double mass = 0.0;
        for (const std::size_t i : indices) {
            GaussianPrimitive p;
            p.mean = mixture.components[i].mean;
            p.covariance = mixture.components[i].covariance;
            p.weight = mixture.components[i].weight;
            mass += p.weight;
            block.components.push_back(std::move(p));
        }
        block_masses[k] = mass;

        ReductionConfig rc;
        rc.m = std::max<std::size_t>(
            1, static_cast<std::size_t>(
                   std::lround(config.retention_ratio * static_cast<double>(indices.size()))));
        rc.m = std::min(rc.m, indices.size());
        rc.max_iterations = config.max_iterations;
        rc.empty_cluster_policy = config.empty_cluster_policy;
        rc.seed = hash_block_seed(config.seed, k);
        if (rc.m == indices.size()) {
            // Identity reduction: keep the block exactly as-is.
            rc.init_strategy = InitStrategy::provided_centers;
            rc.initial_centers = block.components;
        }
        try {
            results[k] = reduce(block, rc);
        } catch (const std::exception& e) {
            throw NumericError("block " + std::to_string(k) + ": " + e.what());
        }
    };

    unsigned workers = config.parallelism != 0 ? config.parallelism
                                               : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(block_count)));
    if (workers == 1) {
        for (std::size_t k = 0; k < block_count; ++k) {
            reduce_block(k);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&]() {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= block_count) {
                    return;
                }
                try {
                    reduce_block(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) {
                        first_error = std::current_exception();
                    }
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
        if (first_error) {
            std::rethrow_exception(first_error);
        }
    }

    GaussianMixture reduced;
    reduced.dim = mixture.dim;
    std::vector<std::size_t> reduced_per_block(block_count);
    for (std::size_t k = 0; k < block_count; ++k) {
        const ReductionResult& r = results[k];
        BlockReport br;
        br.index = k;
        br.size = partition.blocks[k].size();
        br.reduced = r.reduced.size();
        br.iterations = r.iterations;
        br.converged = r.converged;
        br.ctd = r.ctd_trace.empty() ? 0.0 : r.ctd_trace.back();
        br.cost_evaluations = r.cost_evaluations;
        br.input_mass = block_masses[k];
        br.reduced_mass = r.reduced.total_mass();
        report.blocks.push_back(br);

        report.total_ctd += br.ctd;
        report.cost_evaluations += br.cost_evaluations;
        report.per_iteration_cost_evaluations += br.size * br.reduced;
        reduced_per_block[k] = br.reduced;
        for (auto& c : r.reduced.components) {
            reduced.components.push_back(std::move(c));
        }
    }
    report.output_count = reduced.size();
    report.reduce_ms = ms_since(t_reduce);

    const bool has_appearance =
        std::all_of(mixture.components.begin(), mixture.components.end(),
                    [](const GaussianPrimitive& c) { return c.appearance.has_value(); });
    if (has_appearance) {
        const auto t_transfer = Clock::now();
        reduced = transfer_appearance(mixture, reduced, partition, reduced_per_block,
                                      config.nn_mode);
        report.transfer_ms = ms_since(t_transfer);
    }
    return {std::move(reduced), std::move(report)};
}

std::string report_to_json(const CompactionReport& report, bool include_timings) {
    nlohmann::json doc;
    doc["input_count"] = report.input_count;
    doc["output_count"] = report.output_count;
    doc["depth"] = report.depth;
    doc["retention_ratio"] = report.retention_ratio;
    doc["block_capacity"] = report.block_capacity;
    doc["seed"] = report.seed;
    doc["nn_mode"] = nn_mode_name(report.nn_mode);
    doc["axis_rule"] = axis_rule_name(report.axis_rule);
    doc["total_ctd"] = report.total_ctd;
    doc["cost_evaluations"] = report.cost_evaluations;
    doc["per_iteration_cost_evaluations"] = report.per_iteration_cost_evaluations;
    doc["blocks"] = nlohmann::json::array();
    for (const auto& b : report.blocks) {
        doc["blocks"].push_back({
            {"index", b.index},
            {"size", b.size},
            {"reduced", b.reduced},
            {"iterations", b.iterations},
            {"converged", b.converged},
            {"ctd", b.ctd},
            {"cost_evaluations", b.cost_evaluations},
            {"input_mass", b.input_mass},
            {"reduced_mass", b.reduced_mass},
        });
    }
    if (include_timings) {
        doc["timings_ms"] = {
            {"partition", report.partition_ms},
            {"reduce", report.reduce_ms},
            {"transfer", report.transfer_ms},
        };
    }
    return doc.dump(2) + "\n";
}

} // namespace ghap
