#pragma once

#include "ghap/mixture.hpp"

#include <cstdint>

namespace ghap {

enum class WeightLaw {
    uniform,        // every weight 1/K
    dirichlet_like, // Exp(1) draws normalized to sum 1 (flat Dirichlet)
};

/// Generator parameters for synthetic mixtures. Means are uniform in
/// `mean_box`, covariances are R diag(lambda) R^T with a random rotation and
/// eigenvalues in [cov_scale/sqrt(a), cov_scale*sqrt(a)] for anisotropy a.
struct SynthSpec {
    int dim = 2;
    std::size_t components = 1000;
    Eigen::VectorXd box_lo;
    Eigen::VectorXd box_hi;
    double cov_scale = 0.04;
    double cov_anisotropy = 4.0;
    WeightLaw weight_law = WeightLaw::dirichlet_like;
    std::uint64_t seed = 0;

    /// Axis-aligned unit-ish defaults: [0, 10]^dim.
    static SynthSpec defaults(int dim);
};

/// Deterministic per seed; weights sum to 1; every covariance is PSD by
/// construction.
GaussianMixture synth_mixture(const SynthSpec& spec);

} // namespace ghap
