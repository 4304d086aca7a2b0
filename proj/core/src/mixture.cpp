#include "ghap/mixture.hpp"

#include "ghap/errors.hpp"
#include "ghap/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace ghap {

double Rng::next_normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    const double u1 = 1.0 - next_double(); // (0, 1], keeps log finite
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

double GaussianMixture::total_mass() const {
    double mass = 0.0;
    for (const auto& c : components) {
        mass += c.weight;
    }
    return mass;
}

void validate_primitive(const GaussianPrimitive& p, std::size_t index) {
    const std::string tag = "component " + std::to_string(index);
    if (!(p.weight > 0.0) || !std::isfinite(p.weight)) {
        throw NumericError(tag + ": weight must be positive and finite");
    }
    if (!p.mean.allFinite() || !p.covariance.allFinite()) {
        throw NumericError(tag + ": non-finite parameter");
    }
    if (p.covariance.rows() != p.dim() || p.covariance.cols() != p.dim()) {
        throw NumericError(tag + ": covariance shape does not match mean dimension");
    }
    const double fro = p.covariance.norm();
    const double asym = (p.covariance - p.covariance.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * std::max(fro, 1e-300)) {
        throw NumericError(tag + ": covariance not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.covariance, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (lo < -1e-9 * std::max(hi, 0.0)) {
        throw NumericError(tag + ": covariance not positive semidefinite");
    }
}

void validate_mixture(const GaussianMixture& mixture) {
    if (mixture.dim != 2 && mixture.dim != 3) {
        throw NumericError("mixture dimension must be 2 or 3");
    }
    for (std::size_t i = 0; i < mixture.components.size(); ++i) {
        if (mixture.components[i].dim() != mixture.dim) {
            throw NumericError("component " + std::to_string(i) + ": dimension mismatch");
        }
        validate_primitive(mixture.components[i], i);
    }
    if (!mixture.empty()) {
        const double mass = mixture.total_mass();
        if (!(mass > 0.0) || !std::isfinite(mass)) {
            throw NumericError("mixture total mass must be positive and finite");
        }
    }
}

double cost(const GaussianPrimitive& a, const GaussianPrimitive& b) {
    if (a.dim() != b.dim()) {
        throw NumericError("cost: dimension mismatch");
    }
    return cost(a.mean, a.covariance, b.mean, b.covariance);
}

DensityEvaluator::DensityEvaluator(const GaussianMixture& mixture) : dim_(mixture.dim) {
    components_.reserve(mixture.size());
    const double norm_pow = -0.5 * static_cast<double>(mixture.dim);
    for (std::size_t i = 0; i < mixture.size(); ++i) {
        const auto& c = mixture.components[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.covariance);
        const Eigen::VectorXd& lambda = eig.eigenvalues();
        const double lo = lambda.minCoeff();
        const double hi = lambda.maxCoeff();
        if (!(lo > 0.0) || hi / lo > 1e12) {
            throw NumericError("degenerate component " + std::to_string(i));
        }
        Component out;
        out.mean = c.mean;
        out.precision = eig.eigenvectors() * lambda.cwiseInverse().asDiagonal() *
                        eig.eigenvectors().transpose();
        double log_det = 0.0;
        for (Eigen::Index k = 0; k < lambda.size(); ++k) {
            log_det += std::log(lambda[k]);
        }
        out.scaled_weight =
            c.weight * std::exp(norm_pow * std::log(2.0 * M_PI) - 0.5 * log_det);
        components_.push_back(std::move(out));
    }
}

double DensityEvaluator::operator()(const Eigen::VectorXd& x) const {
    if (x.size() != dim_) {
        throw NumericError("density: point dimension mismatch");
    }
    double sum = 0.0;
    for (const auto& c : components_) {
        const Eigen::VectorXd d = x - c.mean;
        const double q = d.dot(c.precision * d);
        sum += c.scaled_weight * std::exp(-0.5 * q);
    }
    return sum;
}

double density_at(const GaussianMixture& mixture, const Eigen::VectorXd& x) {
    return DensityEvaluator(mixture)(x);
}

} // namespace ghap
