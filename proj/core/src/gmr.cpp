#include "ghap/gmr.hpp"

#include "ghap/errors.hpp"
#include "ghap/rng.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <utility>

namespace ghap {

namespace {

bool centers_equal(const std::vector<GaussianPrimitive>& a,
                   const std::vector<GaussianPrimitive>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j].weight != b[j].weight) {
            return false;
        }
        if (!(a[j].mean.array() == b[j].mean.array()).all()) {
            return false;
        }
        if (!(a[j].covariance.array() == b[j].covariance.array()).all()) {
            return false;
        }
    }
    return true;
}

// Moves one assigned component into each empty cluster: the component with
// the largest weight*cost contribution whose cluster keeps >= 2 members.
void reseed_empty_clusters(std::vector<std::size_t>& assignments,
                           std::vector<double>& contributions,
                           std::vector<std::size_t>& counts) {
    for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] != 0) {
            continue;
        }
        std::size_t donor = assignments.size();
        double best = -1.0;
        for (std::size_t i = 0; i < assignments.size(); ++i) {
            if (counts[assignments[i]] < 2) {
                continue;
            }
            if (contributions[i] > best) {
                best = contributions[i];
                donor = i;
            }
        }
        if (donor == assignments.size()) {
            throw NumericError("reseed_empty_clusters: no donor component");
        }
        --counts[assignments[donor]];
        assignments[donor] = j;
        counts[j] = 1;
        contributions[donor] = 0.0;
    }
}

void drop_empty_clusters(std::vector<std::size_t>& assignments,
                         std::vector<GaussianPrimitive>& centers,
                         const std::vector<std::size_t>& counts) {
    std::vector<std::size_t> remap(counts.size());
    std::vector<GaussianPrimitive> kept;
    kept.reserve(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] > 0) {
            remap[j] = kept.size();
            kept.push_back(std::move(centers[j]));
        }
    }
    centers = std::move(kept);
    for (auto& a : assignments) {
        a = remap[a];
    }
}

} // namespace

std::vector<GaussianPrimitive> initialize_centers(const GaussianMixture& mixture,
                                                  std::size_t m, std::uint64_t seed) {
    const std::size_t n = mixture.size();
    if (m == 0 || m > n) {
        throw NumericError("initialize_centers: need 1 <= m <= n, got m=" +
                           std::to_string(m) + ", n=" + std::to_string(n));
    }
    Rng rng(seed);
    std::vector<bool> picked(n, false);
    std::vector<GaussianPrimitive> centers;
    centers.reserve(m);
    for (std::size_t draw = 0; draw < m; ++draw) {
        double remaining = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!picked[i]) {
                remaining += mixture.components[i].weight;
            }
        }
        if (!(remaining > 0.0)) {
            throw NumericError("initialize_centers: non-positive remaining mass");
        }
        const double target = rng.next_double() * remaining;
        double cum = 0.0;
        std::size_t chosen = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (picked[i]) {
                continue;
            }
            cum += mixture.components[i].weight;
            chosen = i;
            if (cum > target) {
                break;
            }
        }
        picked[chosen] = true;
        GaussianPrimitive center;
        center.mean = mixture.components[chosen].mean;
        center.covariance = mixture.components[chosen].covariance;
        center.weight = mixture.components[chosen].weight;
        centers.push_back(std::move(center));
    }
    return centers;
}

AssignResult assign(const GaussianMixture& mixture,
                    const std::vector<GaussianPrimitive>& centers) {
    if (centers.empty()) {
        throw NumericError("assign: no centers");
    }
    for (const auto& c : centers) {
        if (c.dim() != mixture.dim) {
            throw NumericError("assign: center dimension mismatch");
        }
    }
    const std::size_t n = mixture.size();
    const std::size_t m = centers.size();

    AssignResult result;
    result.assignments.resize(n);
    result.contributions.resize(n);
    result.cost_evaluations = n * m;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = mixture.components[i];
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const double d = cost(c.mean, c.covariance, centers[j].mean, centers[j].covariance);
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        result.assignments[i] = best_j;
        result.contributions[i] = c.weight * best;
        result.ctd += result.contributions[i];
    }
    return result;
}

std::vector<GaussianPrimitive> update_barycenters(const GaussianMixture& mixture,
                                                  const std::vector<std::size_t>& assignments,
                                                  std::size_t m) {
    const Eigen::Index dim = mixture.dim;
    std::vector<double> mass(m, 0.0);
    std::vector<std::size_t> counts(m, 0);
    std::vector<std::size_t> sole_member(m, 0);
    std::vector<Eigen::VectorXd> mean_sum(m, Eigen::VectorXd::Zero(dim));
    std::vector<Eigen::MatrixXd> cov_sum(m, Eigen::MatrixXd::Zero(dim, dim));

    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const std::size_t j = assignments[i];
        if (j >= m) {
            throw NumericError("update_barycenters: assignment out of range");
        }
        const auto& c = mixture.components[i];
        mass[j] += c.weight;
        mean_sum[j] += c.weight * c.mean;
        cov_sum[j] += c.weight * c.covariance;
        ++counts[j];
        sole_member[j] = i;
    }

    std::vector<GaussianPrimitive> centers(m);
    for (std::size_t j = 0; j < m; ++j) {
        if (counts[j] == 0) {
            throw NumericError("update_barycenters: empty cluster " + std::to_string(j));
        }
        if (counts[j] == 1) {
            // Singleton barycenter is the member itself, bit-exact.
            const auto& c = mixture.components[sole_member[j]];
            centers[j].mean = c.mean;
            centers[j].covariance = c.covariance;
            centers[j].weight = c.weight;
        } else {
            centers[j].mean = mean_sum[j] / mass[j];
            centers[j].covariance = cov_sum[j] / mass[j];
            centers[j].weight = mass[j];
        }
    }
    return centers;
}

ReductionResult reduce(const GaussianMixture& mixture, const ReductionConfig& config) {
    const std::size_t n = mixture.size();
    if (config.m == 0 || config.m > n) {
        throw NumericError("reduce: need 1 <= m <= n, got m=" + std::to_string(config.m) +
                           ", n=" + std::to_string(n));
    }
    if (config.max_iterations < 1) {
        throw NumericError("reduce: max_iterations must be >= 1");
    }

    std::vector<GaussianPrimitive> centers;
    if (config.init_strategy == InitStrategy::provided_centers) {
        if (config.initial_centers.size() != config.m) {
            throw NumericError("reduce: provided_centers requires exactly m initial centers");
        }
        centers.reserve(config.m);
        for (const auto& c : config.initial_centers) {
            GaussianPrimitive copy;
            copy.mean = c.mean;
            copy.covariance = c.covariance;
            copy.weight = c.weight;
            centers.push_back(std::move(copy));
        }
    } else {
        centers = initialize_centers(mixture, config.m, config.seed);
    }

    ReductionResult result;
    std::vector<std::size_t> prev_assignments;
    std::vector<std::size_t> assignments;

    for (int t = 1; t <= config.max_iterations; ++t) {
        AssignResult pass = assign(mixture, centers);
        result.ctd_trace.push_back(pass.ctd);
        result.cost_evaluations += pass.cost_evaluations;
        result.iterations = t;
        assignments = std::move(pass.assignments);

        if (t >= 2 && assignments == prev_assignments) {
            result.converged = true;
            break;
        }

        std::vector<std::size_t> counts(centers.size(), 0);
        for (const auto a : assignments) {
            ++counts[a];
        }
        const bool has_empty = std::any_of(counts.begin(), counts.end(),
                                           [](std::size_t c) { return c == 0; });
        if (has_empty) {
            if (config.empty_cluster_policy == EmptyClusterPolicy::drop) {
                drop_empty_clusters(assignments, centers, counts);
            } else {
                reseed_empty_clusters(assignments, pass.contributions, counts);
            }
        }

        std::vector<GaussianPrimitive> next =
            update_barycenters(mixture, assignments, centers.size());
        if (centers_equal(next, centers)) {
            centers = std::move(next);
            result.converged = true;
            break;
        }
        centers = std::move(next);
        prev_assignments = std::move(assignments);
        assignments.clear();
    }

    if (!result.converged) {
        // Ran out of iterations: centers are the barycenters of the last
        // assignment pass, which is still a consistent pair.
        assignments = std::move(prev_assignments);
    }

    result.reduced.dim = mixture.dim;
    result.reduced.components = std::move(centers);
    result.assignments = std::move(assignments);
    return result;
}

double ctd_to(const GaussianMixture& mixture, const GaussianMixture& reduced) {
    if (reduced.empty()) {
        throw NumericError("ctd_to: reduced mixture is empty");
    }
    if (mixture.dim != reduced.dim) {
        throw NumericError("ctd_to: dimension mismatch");
    }
    double total = 0.0;
    for (const auto& c : mixture.components) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : reduced.components) {
            best = std::min(best, cost(c.mean, c.covariance, r.mean, r.covariance));
        }
        total += c.weight * best;
    }
    return total;
}

} // namespace ghap
