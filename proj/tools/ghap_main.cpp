// ghap: compact 3D Gaussian Splatting scenes by blockwise Gaussian mixture
// reduction, plus synthetic-scene evaluation utilities.
//
// Exit codes: 0 success, 1 usage error, 2 data/IO error, 3 numerical failure.

#include "ghap/baselines.hpp"
#include "ghap/comparison.hpp"
#include "ghap/errors.hpp"
#include "ghap/gmr.hpp"
#include "ghap/metrics.hpp"
#include "ghap/mixture.hpp"
#include "ghap/mixture_csv.hpp"
#include "ghap/pipeline.hpp"
#include "ghap/splat_io.hpp"
#include "ghap/synth.hpp"

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace ghap;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

GaussianMixture load_mixture(const std::string& path) {
    if (ends_with(path, ".ply")) {
        return read_splats_file(path);
    }
    if (ends_with(path, ".csv")) {
        return read_mixture_csv_file(path);
    }
    throw UsageError("--input must end in .ply or .csv: " + path);
}

void save_mixture(const std::string& path, const GaussianMixture& mixture) {
    if (ends_with(path, ".ply")) {
        write_splats_file(path, mixture);
        return;
    }
    if (ends_with(path, ".csv")) {
        write_mixture_csv_file(path, mixture);
        return;
    }
    throw UsageError("--output must end in .ply or .csv: " + path);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot open config '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<double> parse_number_list(const std::string& text, std::size_t expected,
                                      const std::string& flag) {
    std::vector<double> values;
    std::istringstream fields(text);
    std::string cell;
    while (std::getline(fields, cell, ',')) {
        try {
            values.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw UsageError(flag + ": bad number '" + cell + "'");
        }
    }
    if (values.size() != expected) {
        throw UsageError(flag + ": expected " + std::to_string(expected) + " numbers");
    }
    return values;
}

struct CompactArgs {
    std::string input;
    std::string output;
    double rho = 0.1;
    std::size_t block = 1000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string report_path;
    bool timings = false;
    std::string nn = "block";
    int max_iters = 50;
    std::string axis = "spread";
};

int cmd_compact(const CompactArgs& args) {
    if (!(args.rho > 0.0) || args.rho > 1.0) {
        throw UsageError("--rho must be in (0, 1]");
    }
    if (args.block == 0) {
        throw UsageError("--block must be >= 1");
    }
    if (args.max_iters < 1) {
        throw UsageError("--max-iters must be >= 1");
    }

    const GaussianMixture mixture = load_mixture(args.input);
    CompactionConfig config;
    config.retention_ratio = args.rho;
    config.block_capacity = args.block;
    config.seed = args.seed;
    config.parallelism = args.threads;
    config.nn_mode = args.nn == "global" ? NnMode::global_exact : NnMode::within_block;
    config.axis_rule =
        args.axis == "cycle" ? SplitAxisRule::cycle : SplitAxisRule::largest_spread;
    config.max_iterations = args.max_iters;

    const auto start = std::chrono::steady_clock::now();
    auto [reduced, report] = compact(mixture, config);
    const double total_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();

    save_mixture(args.output, reduced);
    if (!args.report_path.empty()) {
        write_text_file(args.report_path, report_to_json(report, args.timings));
    }
    std::printf("compacted %zu -> %zu components (depth %d, %zu blocks), total CTD %.6g, %.0f ms\n",
                report.input_count, report.output_count, report.depth,
                report.blocks.size(), report.total_ctd, total_ms);
    return kExitOk;
}

struct EvalArgs {
    std::string config_path;
    std::string out_json = "ghap_eval.json";
    std::string out_csv = "ghap_eval.csv";
    bool timings = false;
    std::optional<std::size_t> seeds_count;
    std::optional<std::uint64_t> seed_base;
    std::optional<double> rho;
    std::optional<std::size_t> block;
    std::optional<std::size_t> k;
    std::optional<int> dim;
    std::optional<int> res;
    unsigned threads = 0;
};

int cmd_eval(const EvalArgs& args) {
    ComparisonConfig config;
    if (!args.config_path.empty()) {
        config = comparison_config_from_json(read_text_file(args.config_path));
    }
    if (args.dim) {
        SynthSpec fresh = SynthSpec::defaults(*args.dim);
        fresh.components = config.synth.components;
        fresh.cov_scale = config.synth.cov_scale;
        fresh.cov_anisotropy = config.synth.cov_anisotropy;
        fresh.weight_law = config.synth.weight_law;
        config.synth = fresh;
    }
    if (args.k) {
        config.synth.components = *args.k;
    }
    if (args.rho) {
        config.retention_ratio = *args.rho;
    }
    if (args.block) {
        config.block_capacity = *args.block;
    }
    if (args.res) {
        config.grid_resolution = *args.res;
    }
    if (args.seeds_count || args.seed_base) {
        const std::size_t count = args.seeds_count.value_or(config.seeds.size());
        const std::uint64_t base = args.seed_base.value_or(1);
        if (count == 0) {
            throw UsageError("--seeds must be >= 1");
        }
        config.seeds.clear();
        for (std::size_t i = 0; i < count; ++i) {
            config.seeds.push_back(base + i);
        }
    }
    if (!(config.retention_ratio > 0.0) || config.retention_ratio > 1.0) {
        throw UsageError("retention ratio must be in (0, 1]");
    }
    config.parallelism = args.threads;

    const ComparisonReport report = run_comparison(config);
    write_text_file(args.out_json, comparison_to_json(report, args.timings));
    write_text_file(args.out_csv, comparison_to_csv(report));

    std::size_t ghap_wins_prune = 0;
    std::size_t ghap_wins_random = 0;
    for (const auto& cell : report.seeds) {
        double ghap = 0.0, prune = 0.0, random = 0.0;
        for (const auto& m : cell.methods) {
            if (m.method == "ghap") ghap = m.density_l2;
            if (m.method == "prune") prune = m.density_l2;
            if (m.method == "random") random = m.density_l2;
        }
        ghap_wins_prune += ghap < prune ? 1 : 0;
        ghap_wins_random += ghap < random ? 1 : 0;
    }
    std::printf("eval: %zu seeds, ghap beats prune %zu/%zu, beats random %zu/%zu; wrote %s, %s\n",
                report.seeds.size(), ghap_wins_prune, report.seeds.size(),
                ghap_wins_random, report.seeds.size(), args.out_json.c_str(),
                args.out_csv.c_str());
    return kExitOk;
}

struct SynthArgs {
    std::string output;
    int dim = 3;
    std::size_t k = 1000;
    std::uint64_t seed = 0;
    std::string box = "0,10";
    double cov_scale = 0.04;
    double anisotropy = 4.0;
    std::string weight_law = "dirichlet";
};

int cmd_synth(const SynthArgs& args) {
    if (args.dim != 2 && args.dim != 3) {
        throw UsageError("--dim must be 2 or 3");
    }
    const std::vector<double> box = parse_number_list(args.box, 2, "--box");
    if (!(box[0] < box[1])) {
        throw UsageError("--box needs lo < hi");
    }
    SynthSpec spec = SynthSpec::defaults(args.dim);
    spec.components = args.k;
    spec.seed = args.seed;
    spec.box_lo.setConstant(box[0]);
    spec.box_hi.setConstant(box[1]);
    spec.cov_scale = args.cov_scale;
    spec.cov_anisotropy = args.anisotropy;
    if (args.weight_law == "uniform") {
        spec.weight_law = WeightLaw::uniform;
    } else if (args.weight_law == "dirichlet") {
        spec.weight_law = WeightLaw::dirichlet_like;
    } else {
        throw UsageError("--weight-law must be uniform or dirichlet");
    }

    GaussianMixture mixture = synth_mixture(spec);
    if (args.dim == 3 && ends_with(args.output, ".ply")) {
        // Neutral appearance so the splat schema is satisfied; the raw
        // opacity round-trips back to the weight on read.
        for (auto& c : mixture.components) {
            Appearance a;
            a.opacity_logit = static_cast<float>(opacity_logit(c.weight));
            c.appearance = a;
        }
    } else if (args.dim == 3) {
        throw UsageError("3D synthetic mixtures are written as .ply");
    } else if (!ends_with(args.output, ".csv")) {
        throw UsageError("2D synthetic mixtures are written as .csv");
    }
    save_mixture(args.output, mixture);
    std::printf("synthesized %zu components (dim %d) -> %s\n", mixture.size(), args.dim,
                args.output.c_str());
    return kExitOk;
}

struct GridArgs {
    std::string input;
    std::string output;
    std::string bbox;
    int res = 256;
    std::string slice_axis = "z";
    std::optional<double> slice_value;
};

int cmd_grid(const GridArgs& args) {
    if (args.res < 2) {
        throw UsageError("--res must be >= 2");
    }
    const GaussianMixture mixture = load_mixture(args.input);
    if (mixture.empty()) {
        throw IoError("grid: input mixture has no components");
    }

    int slice_axis = -1;
    double slice_value = 0.0;
    Region region;
    if (mixture.dim == 3) {
        if (args.slice_axis == "x") {
            slice_axis = 0;
        } else if (args.slice_axis == "y") {
            slice_axis = 1;
        } else if (args.slice_axis == "z") {
            slice_axis = 2;
        } else {
            throw UsageError("--slice-axis must be x, y or z");
        }
    }
    if (!args.bbox.empty()) {
        const std::vector<double> b = parse_number_list(args.bbox, 4, "--bbox");
        region.lo = Eigen::Vector2d(b[0], b[1]);
        region.hi = Eigen::Vector2d(b[2], b[3]);
    } else {
        const Region full = default_region(mixture, mixture, 3.0);
        if (mixture.dim == 2) {
            region = full;
        } else {
            const int ax = slice_axis == 0 ? 1 : 0;
            const int ay = slice_axis == 2 ? 1 : 2;
            region.lo = Eigen::Vector2d(full.lo[ax], full.lo[ay]);
            region.hi = Eigen::Vector2d(full.hi[ax], full.hi[ay]);
            if (!args.slice_value) {
                slice_value = 0.5 * (full.lo[slice_axis] + full.hi[slice_axis]);
            }
        }
    }
    if (args.slice_value) {
        slice_value = *args.slice_value;
    }

    const DensityField field = density_grid(mixture, region, args.res, slice_axis, slice_value);
    if (ends_with(args.output, ".pgm")) {
        write_field_pgm(args.output, field);
    } else if (ends_with(args.output, ".csv")) {
        write_field_csv(args.output, field);
    } else {
        throw UsageError("--output must end in .csv or .pgm");
    }
    std::printf("wrote %dx%d density grid -> %s\n", field.cols, field.rows,
                args.output.c_str());
    return kExitOk;
}

void print_histogram(const char* title, std::vector<double> values) {
    if (values.empty()) {
        return;
    }
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    constexpr int kBins = 10;
    std::vector<std::size_t> bins(kBins, 0);
    for (const double v : values) {
        int bin = hi > lo ? static_cast<int>((v - lo) / (hi - lo) * kBins) : 0;
        bin = std::clamp(bin, 0, kBins - 1);
        ++bins[bin];
    }
    std::printf("%s: min %.6g, max %.6g\n", title, lo, hi);
    const std::size_t peak = *std::max_element(bins.begin(), bins.end());
    for (int b = 0; b < kBins; ++b) {
        const double left = lo + (hi - lo) * b / kBins;
        const int bar = peak > 0 ? static_cast<int>(40.0 * bins[b] / peak) : 0;
        std::printf("  %12.5g | %-40.*s %zu\n", left, bar,
                    "########################################", bins[b]);
    }
}

int cmd_info(const std::string& input) {
    const GaussianMixture mixture = load_mixture(input);
    std::printf("file: %s\n", input.c_str());
    std::printf("format: %s\n", ends_with(input, ".ply") ? "3dgs binary ply" : "mixture csv");
    std::printf("components: %zu (dim %d)\n", mixture.size(), mixture.dim);
    if (mixture.empty()) {
        return kExitOk;
    }
    std::printf("total mass: %.10g\n", mixture.total_mass());

    Eigen::VectorXd lo = mixture.components.front().mean;
    Eigen::VectorXd hi = lo;
    std::vector<double> weights;
    std::vector<double> eigenvalues;
    weights.reserve(mixture.size());
    for (const auto& c : mixture.components) {
        lo = lo.cwiseMin(c.mean);
        hi = hi.cwiseMax(c.mean);
        weights.push_back(c.weight);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.covariance,
                                                           Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
            eigenvalues.push_back(eig.eigenvalues()[i]);
        }
    }
    std::ostringstream lo_s, hi_s;
    for (int a = 0; a < mixture.dim; ++a) {
        lo_s << (a ? ", " : "") << lo[a];
        hi_s << (a ? ", " : "") << hi[a];
    }
    std::printf("mean bbox: [%s] .. [%s]\n", lo_s.str().c_str(), hi_s.str().c_str());
    print_histogram("weights", std::move(weights));
    print_histogram("covariance eigenvalues", std::move(eigenvalues));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian-mixture compaction for 3D Gaussian Splatting scenes"};
    app.require_subcommand(1);

    CompactArgs compact_args;
    auto* compact_cmd =
        app.add_subcommand("compact", "Reduce a scene by blockwise mixture reduction");
    compact_cmd->add_option("--input", compact_args.input, "Input .ply or .csv mixture")
        ->required();
    compact_cmd->add_option("--output", compact_args.output, "Output .ply or .csv mixture")
        ->required();
    compact_cmd->add_option("--rho", compact_args.rho, "Retention ratio in (0, 1]")
        ->required();
    compact_cmd->add_option("--block", compact_args.block, "KD block capacity s");
    compact_cmd->add_option("--seed", compact_args.seed, "Deterministic seed");
    compact_cmd->add_option("--threads", compact_args.threads,
                            "Worker threads (0 = hardware)");
    compact_cmd->add_option("--report", compact_args.report_path,
                            "Write the compaction report JSON here");
    compact_cmd->add_flag("--timings", compact_args.timings,
                          "Include wall times in the report (not reproducible)");
    compact_cmd->add_option("--nn", compact_args.nn, "Appearance neighbor scope")
        ->check(CLI::IsMember({"block", "global"}));
    compact_cmd->add_option("--max-iters", compact_args.max_iters,
                            "Reducer iteration cap");
    compact_cmd->add_option("--axis", compact_args.axis, "KD split axis rule")
        ->check(CLI::IsMember({"spread", "cycle"}));

    EvalArgs eval_args;
    double eval_rho = 0.0;
    std::size_t eval_block = 0, eval_k = 0, eval_seeds = 0;
    std::uint64_t eval_seed_base = 0;
    int eval_dim = 0, eval_res = 0;
    auto* eval_cmd = app.add_subcommand(
        "eval", "Compare compaction against pruning and random baselines");
    eval_cmd->add_option("--config", eval_args.config_path, "Comparison config JSON");
    eval_cmd->add_option("--out-json", eval_args.out_json, "Report JSON path");
    eval_cmd->add_option("--out-csv", eval_args.out_csv, "Flat CSV path");
    eval_cmd->add_flag("--timings", eval_args.timings,
                       "Include wall times in the report (not reproducible)");
    auto* o_seeds = eval_cmd->add_option("--seeds", eval_seeds, "Number of seeds");
    auto* o_base = eval_cmd->add_option("--seed", eval_seed_base, "First seed");
    auto* o_rho = eval_cmd->add_option("--rho", eval_rho, "Retention ratio");
    auto* o_block = eval_cmd->add_option("--block", eval_block, "KD block capacity");
    auto* o_k = eval_cmd->add_option("--k", eval_k, "Synthetic component count");
    auto* o_dim = eval_cmd->add_option("--dim", eval_dim, "Synthetic dimension (2 or 3)");
    auto* o_res = eval_cmd->add_option("--res", eval_res, "Grid resolution");
    eval_cmd->add_option("--threads", eval_args.threads, "Worker threads (0 = hardware)");

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic mixture");
    synth_cmd->add_option("--output", synth_args.output, "Output .ply (3D) or .csv (2D)")
        ->required();
    synth_cmd->add_option("--dim", synth_args.dim, "2 or 3");
    synth_cmd->add_option("--k", synth_args.k, "Component count");
    synth_cmd->add_option("--seed", synth_args.seed, "Deterministic seed");
    synth_cmd->add_option("--box", synth_args.box, "Mean box 'lo,hi' per axis");
    synth_cmd->add_option("--cov-scale", synth_args.cov_scale, "Covariance scale");
    synth_cmd->add_option("--anisotropy", synth_args.anisotropy,
                          "Max/min eigenvalue ratio (>= 1)");
    synth_cmd->add_option("--weight-law", synth_args.weight_law, "uniform or dirichlet");

    GridArgs grid_args;
    double grid_slice_value = 0.0;
    auto* grid_cmd = app.add_subcommand("grid", "Export a density grid as CSV or PGM");
    grid_cmd->add_option("--input", grid_args.input, "Input .ply or .csv mixture")
        ->required();
    grid_cmd->add_option("--output", grid_args.output, "Output .csv or .pgm")->required();
    grid_cmd->add_option("--bbox", grid_args.bbox, "Plot bounds 'x0,y0,x1,y1'");
    grid_cmd->add_option("--res", grid_args.res, "Lattice points per axis");
    grid_cmd->add_option("--slice-axis", grid_args.slice_axis,
                         "Slice axis for 3D input (x, y or z)");
    auto* o_slice =
        grid_cmd->add_option("--slice-value", grid_slice_value, "Slice coordinate");

    std::string info_input;
    auto* info_cmd = app.add_subcommand("info", "Describe a mixture file");
    info_cmd->add_option("--input", info_input, "Input .ply or .csv mixture")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (compact_cmd->parsed()) {
            return cmd_compact(compact_args);
        }
        if (eval_cmd->parsed()) {
            if (o_seeds->count()) eval_args.seeds_count = eval_seeds;
            if (o_base->count()) eval_args.seed_base = eval_seed_base;
            if (o_rho->count()) eval_args.rho = eval_rho;
            if (o_block->count()) eval_args.block = eval_block;
            if (o_k->count()) eval_args.k = eval_k;
            if (o_dim->count()) eval_args.dim = eval_dim;
            if (o_res->count()) eval_args.res = eval_res;
            return cmd_eval(eval_args);
        }
        if (synth_cmd->parsed()) {
            return cmd_synth(synth_args);
        }
        if (grid_cmd->parsed()) {
            if (o_slice->count()) grid_args.slice_value = grid_slice_value;
            return cmd_grid(grid_args);
        }
        if (info_cmd->parsed()) {
            return cmd_info(info_input);
        }
        std::fprintf(stderr, "error: no subcommand\n");
        return kExitUsage;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
}
