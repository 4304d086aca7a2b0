#include "ghap/synth.hpp"

#include "ghap/errors.hpp"
#include "ghap/rng.hpp"

#include <cmath>

namespace ghap {

namespace {

Eigen::MatrixXd random_rotation(int dim, Rng& rng) {
    if (dim == 2) {
        const double theta = 2.0 * M_PI * rng.next_double();
        Eigen::Matrix2d r;
        r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        return r;
    }
    // Uniform rotation from a uniform unit quaternion.
    double w, x, y, z, norm;
    do {
        w = rng.next_normal();
        x = rng.next_normal();
        y = rng.next_normal();
        z = rng.next_normal();
        norm = std::sqrt(w * w + x * x + y * y + z * z);
    } while (norm < 1e-12);
    w /= norm;
    x /= norm;
    y /= norm;
    z /= norm;
    Eigen::Matrix3d r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

} // namespace

SynthSpec SynthSpec::defaults(int dim) {
    SynthSpec spec;
    spec.dim = dim;
    spec.box_lo = Eigen::VectorXd::Zero(dim);
    spec.box_hi = Eigen::VectorXd::Constant(dim, 10.0);
    return spec;
}

GaussianMixture synth_mixture(const SynthSpec& spec) {
    if (spec.dim != 2 && spec.dim != 3) {
        throw NumericError("synth_mixture: dim must be 2 or 3");
    }
    if (spec.components == 0) {
        throw NumericError("synth_mixture: need at least one component");
    }
    if (!(spec.cov_scale > 0.0) || !(spec.cov_anisotropy >= 1.0)) {
        throw NumericError("synth_mixture: cov_scale > 0 and cov_anisotropy >= 1 required");
    }
    if (spec.box_lo.size() != spec.dim || spec.box_hi.size() != spec.dim) {
        throw NumericError("synth_mixture: box bounds must match dim");
    }

    Rng rng(spec.seed);
    const double lambda_lo = spec.cov_scale / std::sqrt(spec.cov_anisotropy);
    const double lambda_hi = spec.cov_scale * std::sqrt(spec.cov_anisotropy);

    GaussianMixture mixture;
    mixture.dim = spec.dim;
    mixture.components.reserve(spec.components);
    for (std::size_t i = 0; i < spec.components; ++i) {
        GaussianPrimitive p;
        p.mean = Eigen::VectorXd(spec.dim);
        for (int a = 0; a < spec.dim; ++a) {
            p.mean[a] = rng.next_in(spec.box_lo[a], spec.box_hi[a]);
        }
        Eigen::VectorXd lambda(spec.dim);
        for (int a = 0; a < spec.dim; ++a) {
            lambda[a] = rng.next_in(lambda_lo, lambda_hi);
        }
        const Eigen::MatrixXd r = random_rotation(spec.dim, rng);
        Eigen::MatrixXd cov = r * lambda.asDiagonal() * r.transpose();
        p.covariance = 0.5 * (cov + cov.transpose());
        p.weight = 1.0; // filled below
        mixture.components.push_back(std::move(p));
    }

    if (spec.weight_law == WeightLaw::uniform) {
        const double w = 1.0 / static_cast<double>(spec.components);
        for (auto& c : mixture.components) {
            c.weight = w;
        }
    } else {
        double total = 0.0;
        for (auto& c : mixture.components) {
            c.weight = std::max(1e-12, -std::log(1.0 - rng.next_double())); // Exp(1)
            total += c.weight;
        }
        for (auto& c : mixture.components) {
            c.weight /= total;
        }
    }
    return mixture;
}

} // namespace ghap
