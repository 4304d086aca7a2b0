#pragma once

#include "ghap/mixture.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ghap {

/// Axis-aligned integration / plotting region.
struct Region {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    int dim() const { return static_cast<int>(lo.size()); }
};

enum class DensityErrorMethod { monte_carlo, grid };

struct DensityErrorSpec {
    DensityErrorMethod method = DensityErrorMethod::grid;
    std::size_t sample_count = 100000; // monte-carlo draws
    int grid_resolution = 256;         // lattice points per axis
    double margin_sigmas = 3.0;        // region inflation in max-std units
    std::optional<Region> region;      // explicit region; default: computed
    std::uint64_t seed = 0;
};

struct DensityError {
    double value = 0.0;     // sqrt(mean squared density difference)
    double std_error = 0.0; // estimator standard error (0 for grid mode)
};

/// Bounding box of both mixtures' means, inflated per axis by
/// margin_sigmas * sqrt(largest covariance eigenvalue over all components).
Region default_region(const GaussianMixture& a, const GaussianMixture& b,
                      double margin_sigmas);

/// Root-mean-square density difference over the region: uniform Monte-Carlo
/// sampling or a trapezoid-weighted lattice. Grid mode is exact-deterministic
/// and symmetric in (a, b); both estimators target the same mean-square
/// functional, so they agree within sampling error.
DensityError density_l2_error(const GaussianMixture& a, const GaussianMixture& b,
                              const DensityErrorSpec& spec);

/// Row-major density field. `rows` indexes the second axis (y), `cols` the
/// first (x). For dim-3 mixtures the lattice lies on an axis-aligned slice:
/// `slice_axis` in {0,1,2} is held at `slice_value` and the remaining two
/// axes span the region (which must then be 2D).
struct DensityField {
    int rows = 0;
    int cols = 0;
    Eigen::VectorXd x_coords;
    Eigen::VectorXd y_coords;
    std::vector<double> values; // rows * cols, row-major

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * cols + col]; }
};

DensityField density_grid(const GaussianMixture& mixture, const Region& region,
                          int resolution, int slice_axis = -1, double slice_value = 0.0);

/// Trapezoid-weighted RMS difference of two fields on the same lattice;
/// equals grid-mode density_l2_error when the fields came from density_grid
/// over the same region.
double field_rms_diff(const DensityField& a, const DensityField& b);

/// Deterministic text/binary exports for the field: CSV (one row per lattice
/// row, 17 significant digits) and 16-bit binary PGM normalized to the field
/// maximum.
void write_field_csv(const std::string& path, const DensityField& field);
void write_field_pgm(const std::string& path, const DensityField& field);

} // namespace ghap
