#include "ghap/metrics.hpp"

#include "ghap/errors.hpp"
#include "ghap/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace ghap {

namespace {

double max_std(const GaussianMixture& mixture) {
    double worst = 0.0;
    for (const auto& c : mixture.components) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.covariance,
                                                           Eigen::EigenvaluesOnly);
        worst = std::max(worst, eig.eigenvalues().maxCoeff());
    }
    return std::sqrt(std::max(worst, 0.0));
}

void accumulate_bounds(const GaussianMixture& m, Eigen::VectorXd& lo, Eigen::VectorXd& hi,
                       bool& any) {
    for (const auto& c : m.components) {
        if (!any) {
            lo = c.mean;
            hi = c.mean;
            any = true;
        } else {
            lo = lo.cwiseMin(c.mean);
            hi = hi.cwiseMax(c.mean);
        }
    }
}

void check_region(const Region& region) {
    if (region.lo.size() != region.hi.size() || region.lo.size() == 0) {
        throw NumericError("region bounds have mismatched dimensions");
    }
    for (Eigen::Index a = 0; a < region.lo.size(); ++a) {
        if (!(region.lo[a] < region.hi[a])) {
            throw NumericError("empty region: axis " + std::to_string(a));
        }
    }
}

double trapezoid_weight(int i, int count) {
    return (i == 0 || i == count - 1) ? 0.5 : 1.0;
}

} // namespace

Region default_region(const GaussianMixture& a, const GaussianMixture& b,
                      double margin_sigmas) {
    if (a.dim != b.dim) {
        throw NumericError("default_region: dimension mismatch");
    }
    Eigen::VectorXd lo, hi;
    bool any = false;
    accumulate_bounds(a, lo, hi, any);
    accumulate_bounds(b, lo, hi, any);
    if (!any) {
        throw NumericError("empty region: no components");
    }
    const double margin = margin_sigmas * std::max(max_std(a), max_std(b));
    Region region;
    region.lo = lo.array() - margin;
    region.hi = hi.array() + margin;
    check_region(region);
    return region;
}

DensityError density_l2_error(const GaussianMixture& a, const GaussianMixture& b,
                              const DensityErrorSpec& spec) {
    if (a.dim != b.dim) {
        throw NumericError("density_l2_error: dimension mismatch");
    }
    const Region region =
        spec.region ? *spec.region : default_region(a, b, spec.margin_sigmas);
    check_region(region);
    if (region.dim() != a.dim) {
        throw NumericError("density_l2_error: region dimension mismatch");
    }
    const DensityEvaluator fa(a);
    const DensityEvaluator fb(b);

    DensityError result;
    if (spec.method == DensityErrorMethod::monte_carlo) {
        if (spec.sample_count == 0) {
            throw NumericError("density_l2_error: sample_count must be >= 1");
        }
        Rng rng(spec.seed);
        double sum = 0.0;
        double sum_sq = 0.0;
        Eigen::VectorXd x(region.dim());
        for (std::size_t s = 0; s < spec.sample_count; ++s) {
            for (int axis = 0; axis < region.dim(); ++axis) {
                x[axis] = rng.next_in(region.lo[axis], region.hi[axis]);
            }
            const double d = fa(x) - fb(x);
            sum += d * d;
            sum_sq += d * d * d * d;
        }
        const double n = static_cast<double>(spec.sample_count);
        const double mse = sum / n;
        result.value = std::sqrt(mse);
        if (spec.sample_count > 1) {
            const double var_of_sq = std::max(0.0, sum_sq / n - mse * mse);
            const double se_mse = std::sqrt(var_of_sq / n);
            result.std_error = result.value > 0.0 ? se_mse / (2.0 * result.value) : 0.0;
        }
        return result;
    }

    // Grid mode: trapezoid-weighted lattice, exact and symmetric.
    if (spec.grid_resolution < 2) {
        throw NumericError("density_l2_error: grid resolution must be >= 2");
    }
    const int res = spec.grid_resolution;
    std::vector<int> idx(region.dim(), 0);
    Eigen::VectorXd step(region.dim());
    for (int axis = 0; axis < region.dim(); ++axis) {
        step[axis] = (region.hi[axis] - region.lo[axis]) / (res - 1);
    }
    double weighted_sum = 0.0;
    double weight_total = 0.0;
    Eigen::VectorXd x(region.dim());
    for (;;) {
        double w = 1.0;
        for (int axis = 0; axis < region.dim(); ++axis) {
            x[axis] = region.lo[axis] + step[axis] * idx[axis];
            w *= trapezoid_weight(idx[axis], res);
        }
        const double d = fa(x) - fb(x);
        weighted_sum += w * d * d;
        weight_total += w;

        int axis = 0;
        while (axis < region.dim() && ++idx[axis] == res) {
            idx[axis] = 0;
            ++axis;
        }
        if (axis == region.dim()) {
            break;
        }
    }
    result.value = std::sqrt(weighted_sum / weight_total);
    return result;
}

DensityField density_grid(const GaussianMixture& mixture, const Region& region,
                          int resolution, int slice_axis, double slice_value) {
    check_region(region);
    if (resolution < 2) {
        throw NumericError("density_grid: resolution must be >= 2");
    }
    if (region.dim() != 2) {
        throw NumericError("density_grid: region must be 2D");
    }
    if (mixture.dim == 2 && slice_axis != -1) {
        throw NumericError("density_grid: slice only applies to 3D mixtures");
    }
    if (mixture.dim == 3 && (slice_axis < 0 || slice_axis > 2)) {
        throw NumericError("density_grid: 3D mixtures need slice_axis in {0,1,2}");
    }

    const DensityEvaluator f(mixture);
    DensityField field;
    field.rows = resolution;
    field.cols = resolution;
    field.x_coords.resize(resolution);
    field.y_coords.resize(resolution);
    for (int i = 0; i < resolution; ++i) {
        const double t = static_cast<double>(i) / (resolution - 1);
        field.x_coords[i] = region.lo[0] + t * (region.hi[0] - region.lo[0]);
        field.y_coords[i] = region.lo[1] + t * (region.hi[1] - region.lo[1]);
    }
    field.values.assign(static_cast<std::size_t>(resolution) * resolution, 0.0);

    // The two in-plane axes for a 3D slice, in ascending order.
    int axis_x = 0, axis_y = 1;
    if (mixture.dim == 3) {
        axis_x = slice_axis == 0 ? 1 : 0;
        axis_y = slice_axis == 2 ? 1 : 2;
    }

    auto eval_rows = [&](int row_begin, int row_end) {
        Eigen::VectorXd x(mixture.dim);
        if (mixture.dim == 3) {
            x[slice_axis] = slice_value;
        }
        for (int row = row_begin; row < row_end; ++row) {
            for (int col = 0; col < resolution; ++col) {
                x[axis_x] = field.x_coords[col];
                x[axis_y] = field.y_coords[row];
                field.values[static_cast<std::size_t>(row) * resolution + col] = f(x);
            }
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(resolution));
    if (workers <= 1 || mixture.size() * static_cast<std::size_t>(resolution) < 4096) {
        eval_rows(0, resolution);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const int chunk = (resolution + static_cast<int>(workers) - 1) / static_cast<int>(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const int begin = static_cast<int>(w) * chunk;
            const int end = std::min(resolution, begin + chunk);
            if (begin < end) {
                pool.emplace_back(eval_rows, begin, end);
            }
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    return field;
}

double field_rms_diff(const DensityField& a, const DensityField& b) {
    if (a.rows != b.rows || a.cols != b.cols) {
        throw NumericError("field_rms_diff: lattice shapes differ");
    }
    double weighted_sum = 0.0;
    double weight_total = 0.0;
    for (int row = 0; row < a.rows; ++row) {
        for (int col = 0; col < a.cols; ++col) {
            const double w =
                trapezoid_weight(row, a.rows) * trapezoid_weight(col, a.cols);
            const double d = a.at(row, col) - b.at(row, col);
            weighted_sum += w * d * d;
            weight_total += w;
        }
    }
    return std::sqrt(weighted_sum / weight_total);
}

void write_field_csv(const std::string& path, const DensityField& field) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    char buf[64];
    for (int row = 0; row < field.rows; ++row) {
        for (int col = 0; col < field.cols; ++col) {
            std::snprintf(buf, sizeof(buf), "%.17g", field.at(row, col));
            out << buf << (col + 1 == field.cols ? "\n" : ",");
        }
    }
    if (!out) {
        throw IoError("write_field_csv: stream write failed");
    }
}

void write_field_pgm(const std::string& path, const DensityField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    double peak = 0.0;
    for (const double v : field.values) {
        peak = std::max(peak, v);
    }
    out << "P5\n" << field.cols << " " << field.rows << "\n65535\n";
    for (int row = 0; row < field.rows; ++row) {
        for (int col = 0; col < field.cols; ++col) {
            const double v = field.at(row, col);
            const double scaled = peak > 0.0 ? v / peak : 0.0;
            const auto q = static_cast<std::uint16_t>(std::lround(scaled * 65535.0));
            const unsigned char bytes[2] = {static_cast<unsigned char>(q >> 8),
                                            static_cast<unsigned char>(q & 0xFF)};
            out.write(reinterpret_cast<const char*>(bytes), 2);
        }
    }
    if (!out) {
        throw IoError("write_field_pgm: stream write failed");
    }
}

} // namespace ghap
