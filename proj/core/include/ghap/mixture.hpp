#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace ghap {

/// Per-splat appearance payload carried through compaction unchanged.
/// Layout mirrors the 3DGS checkpoint: raw (pre-sigmoid) opacity, degree-3
/// spherical harmonics split into the DC term and 45 rest coefficients, and
/// a normal vector nobody interprets but everybody stores.
struct Appearance {
    float opacity_logit = 0.0f;
    std::array<float, 3> sh_dc{};
    std::array<float, 45> sh_rest{};
    std::array<float, 3> normal{};
};

/// One mixture component: weighted anisotropic Gaussian, optionally with an
/// appearance payload attached (3DGS splats have one, synthetic mixtures
/// usually do not).
struct GaussianPrimitive {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    double weight = 1.0;
    std::optional<Appearance> appearance;

    Eigen::Index dim() const { return mean.size(); }
};

/// Unnormalized Gaussian mixture over R^dim, dim in {2, 3}. Component order
/// is stable and meaningful: indices into `components` are the indices used
/// by partitions, assignments and appearance transfer.
struct GaussianMixture {
    int dim = 3;
    std::vector<GaussianPrimitive> components;

    std::size_t size() const { return components.size(); }
    bool empty() const { return components.empty(); }
    double total_mass() const;
};

/// Throws NumericError if the primitive violates its invariants:
/// weight > 0, covariance symmetric (within 1e-9 of its Frobenius norm)
/// and PSD (smallest eigenvalue >= -1e-9 * largest), all entries finite.
/// `index` is only used to name the component in the error message.
void validate_primitive(const GaussianPrimitive& p, std::size_t index = 0);

/// Validates every component plus the shared-dimension and positive-mass
/// invariants of the mixture as a whole.
void validate_mixture(const GaussianMixture& mixture);

/// Pairwise reduction cost: squared Euclidean distance between means plus
/// squared Frobenius distance between covariances. Symmetric, >= 0, and zero
/// exactly when the parameters coincide.
double cost(const GaussianPrimitive& a, const GaussianPrimitive& b);

/// Same cost on raw parameters; the hot loops use this form.
inline double cost(const Eigen::VectorXd& mean_a, const Eigen::MatrixXd& cov_a,
                   const Eigen::VectorXd& mean_b, const Eigen::MatrixXd& cov_b) {
    return (mean_a - mean_b).squaredNorm() + (cov_a - cov_b).squaredNorm();
}

/// Mixture density sum_i alpha_i * N(x; mu_i, Sigma_i) with the standard
/// multivariate normal PDF. Precomputes per-component inverses once, so grid
/// sweeps over many x are cheap. Construction throws NumericError
/// ("degenerate component i") when a covariance is singular or its condition
/// number exceeds 1e12.
class DensityEvaluator {
public:
    explicit DensityEvaluator(const GaussianMixture& mixture);

    double operator()(const Eigen::VectorXd& x) const;

    int dim() const { return dim_; }

private:
    struct Component {
        Eigen::VectorXd mean;
        Eigen::MatrixXd precision;
        double scaled_weight; // alpha * (2pi)^(-d/2) * |Sigma|^(-1/2)
    };
    std::vector<Component> components_;
    int dim_;
};

/// One-shot density evaluation; builds a DensityEvaluator internally.
double density_at(const GaussianMixture& mixture, const Eigen::VectorXd& x);

} // namespace ghap
