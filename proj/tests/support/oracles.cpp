#include "support/oracles.hpp"

#include "ghap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ghap::testing {

double oracle_cost(const GaussianPrimitive& a, const GaussianPrimitive& b) {
    double total = 0.0;
    for (Eigen::Index k = 0; k < a.mean.size(); ++k) {
        const double d = a.mean[k] - b.mean[k];
        total += d * d;
    }
    for (Eigen::Index r = 0; r < a.covariance.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.covariance.cols(); ++c) {
            const double d = a.covariance(r, c) - b.covariance(r, c);
            total += d * d;
        }
    }
    return total;
}

double brute_force_ctd(const GaussianMixture& mixture,
                       const std::vector<GaussianPrimitive>& centers) {
    double total = 0.0;
    for (const auto& comp : mixture.components) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& center : centers) {
            best = std::min(best, oracle_cost(comp, center));
        }
        total += comp.weight * best;
    }
    return total;
}

namespace {

double partition_cost(const GaussianMixture& mixture,
                      const std::vector<std::size_t>& labels, std::size_t m) {
    const Eigen::Index dim = mixture.components.front().dim();
    std::vector<double> mass(m, 0.0);
    std::vector<Eigen::VectorXd> mean_sum(m, Eigen::VectorXd::Zero(dim));
    std::vector<Eigen::MatrixXd> cov_sum(m, Eigen::MatrixXd::Zero(dim, dim));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& c = mixture.components[i];
        mass[labels[i]] += c.weight;
        mean_sum[labels[i]] += c.weight * c.mean;
        cov_sum[labels[i]] += c.weight * c.covariance;
    }
    std::vector<GaussianPrimitive> barycenters(m);
    for (std::size_t j = 0; j < m; ++j) {
        barycenters[j].mean = mean_sum[j] / mass[j];
        barycenters[j].covariance = cov_sum[j] / mass[j];
    }
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        total += mixture.components[i].weight *
                 oracle_cost(mixture.components[i], barycenters[labels[i]]);
    }
    return total;
}

} // namespace

double enumerate_partition_optimum(const GaussianMixture& mixture, std::size_t m) {
    const std::size_t n = mixture.size();
    if (n > 10) {
        throw std::invalid_argument("enumerate_partition_optimum: n too large");
    }
    std::size_t total_assignments = 1;
    for (std::size_t i = 0; i < n; ++i) {
        total_assignments *= m;
    }
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> labels(n);
    for (std::size_t code = 0; code < total_assignments; ++code) {
        std::size_t rest = code;
        std::vector<bool> used(m, false);
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = rest % m;
            used[labels[i]] = true;
            rest /= m;
        }
        if (!std::all_of(used.begin(), used.end(), [](bool u) { return u; })) {
            continue;
        }
        best = std::min(best, partition_cost(mixture, labels, m));
    }
    return best;
}

double transport_lp(const std::vector<std::vector<double>>& cost,
                    const std::vector<std::int64_t>& supply,
                    const std::vector<std::int64_t>& demand) {
    const std::size_t n = supply.size();
    const std::size_t m = demand.size();

    // Node layout: 0 = source, 1..n = suppliers, n+1..n+m = consumers,
    // n+m+1 = sink. Successive shortest paths with Bellman-Ford.
    struct Arc {
        std::size_t to;
        std::size_t rev; // index of the reverse arc in graph[to]
        std::int64_t capacity;
        double cost;
    };
    const std::size_t nodes = n + m + 2;
    const std::size_t source = 0;
    const std::size_t sink = n + m + 1;
    std::vector<std::vector<Arc>> graph(nodes);
    auto add_arc = [&](std::size_t from, std::size_t to, std::int64_t cap, double c) {
        graph[from].push_back({to, graph[to].size(), cap, c});
        graph[to].push_back({from, graph[from].size() - 1, 0, -c});
    };
    for (std::size_t i = 0; i < n; ++i) {
        add_arc(source, 1 + i, supply[i], 0.0);
    }
    for (std::size_t j = 0; j < m; ++j) {
        add_arc(1 + n + j, sink, demand[j], 0.0);
    }
    const std::int64_t inf_cap = std::numeric_limits<std::int64_t>::max() / 4;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            add_arc(1 + i, 1 + n + j, inf_cap, cost[i][j]);
        }
    }

    double total_cost = 0.0;
    for (;;) {
        // Bellman-Ford from source over residual arcs.
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<double> dist(nodes, inf);
        std::vector<std::size_t> prev_node(nodes, nodes);
        std::vector<std::size_t> prev_arc(nodes, 0);
        dist[source] = 0.0;
        for (std::size_t round = 0; round + 1 < nodes; ++round) {
            bool changed = false;
            for (std::size_t u = 0; u < nodes; ++u) {
                if (dist[u] == inf) {
                    continue;
                }
                for (std::size_t a = 0; a < graph[u].size(); ++a) {
                    const Arc& arc = graph[u][a];
                    if (arc.capacity <= 0) {
                        continue;
                    }
                    if (dist[u] + arc.cost < dist[arc.to] - 1e-15) {
                        dist[arc.to] = dist[u] + arc.cost;
                        prev_node[arc.to] = u;
                        prev_arc[arc.to] = a;
                        changed = true;
                    }
                }
            }
            if (!changed) {
                break;
            }
        }
        if (dist[sink] == inf) {
            break; // all demand satisfied
        }
        std::int64_t push = inf_cap;
        for (std::size_t v = sink; v != source; v = prev_node[v]) {
            push = std::min(push, graph[prev_node[v]][prev_arc[v]].capacity);
        }
        for (std::size_t v = sink; v != source; v = prev_node[v]) {
            Arc& arc = graph[prev_node[v]][prev_arc[v]];
            arc.capacity -= push;
            graph[arc.to][arc.rev].capacity += push;
            total_cost += static_cast<double>(push) * arc.cost;
        }
    }
    return total_cost;
}

GaussianPrimitive numeric_barycenter(const std::vector<GaussianPrimitive>& members,
                                     const std::vector<double>& weights) {
    const Eigen::Index dim = members.front().dim();
    double total_weight = 0.0;
    for (const double w : weights) {
        total_weight += w;
    }

    // Start from the unweighted average, deliberately not the answer.
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& p : members) {
        mu += p.mean;
        sigma += p.covariance;
    }
    mu /= static_cast<double>(members.size());
    sigma /= static_cast<double>(members.size());
    mu.array() += 0.37;
    sigma.array() += 0.11;

    const double step = 0.45 / total_weight;
    for (int iter = 0; iter < 400; ++iter) {
        Eigen::VectorXd grad_mu = Eigen::VectorXd::Zero(dim);
        Eigen::MatrixXd grad_sigma = Eigen::MatrixXd::Zero(dim, dim);
        for (std::size_t i = 0; i < members.size(); ++i) {
            grad_mu += 2.0 * weights[i] * (mu - members[i].mean);
            grad_sigma += 2.0 * weights[i] * (sigma - members[i].covariance);
        }
        mu -= step * grad_mu;
        sigma -= step * grad_sigma;
    }

    GaussianPrimitive out;
    out.mean = mu;
    out.covariance = sigma;
    out.weight = total_weight;
    return out;
}

std::vector<double> barycenter_fd_gradient(const std::vector<GaussianPrimitive>& members,
                                           const std::vector<double>& weights,
                                           const GaussianPrimitive& at) {
    const Eigen::Index dim = at.dim();
    auto objective = [&](const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma) {
        double total = 0.0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            GaussianPrimitive probe;
            probe.mean = mu;
            probe.covariance = sigma;
            total += weights[i] * oracle_cost(members[i], probe);
        }
        return total;
    };

    std::vector<double> grad;
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double h = 1e-5 * std::max(1.0, std::abs(at.mean[k]));
        Eigen::VectorXd up = at.mean, down = at.mean;
        up[k] += h;
        down[k] -= h;
        grad.push_back((objective(up, at.covariance) - objective(down, at.covariance)) /
                       (2.0 * h));
    }
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            const double h = 1e-5 * std::max(1.0, std::abs(at.covariance(r, c)));
            Eigen::MatrixXd up = at.covariance, down = at.covariance;
            up(r, c) += h;
            down(r, c) -= h;
            grad.push_back((objective(at.mean, up) - objective(at.mean, down)) / (2.0 * h));
        }
    }
    return grad;
}

GaussianMixture random_instance(int dim, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    GaussianMixture mixture;
    mixture.dim = dim;
    mixture.components.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        GaussianPrimitive p;
        p.mean = Eigen::VectorXd(dim);
        for (int a = 0; a < dim; ++a) {
            p.mean[a] = rng.next_in(0.0, 4.0);
        }
        Eigen::VectorXd lambda(dim);
        for (int a = 0; a < dim; ++a) {
            lambda[a] = rng.next_in(0.05, 0.6);
        }
        Eigen::MatrixXd rot;
        if (dim == 2) {
            const double theta = 2.0 * M_PI * rng.next_double();
            rot = Eigen::Matrix2d();
            rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        } else {
            double w = rng.next_normal(), x = rng.next_normal(), y = rng.next_normal(),
                   z = rng.next_normal();
            const double norm = std::sqrt(w * w + x * x + y * y + z * z) + 1e-300;
            w /= norm;
            x /= norm;
            y /= norm;
            z /= norm;
            rot = Eigen::Matrix3d();
            rot << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
                2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
                2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
        }
        Eigen::MatrixXd cov = rot * lambda.asDiagonal() * rot.transpose();
        p.covariance = 0.5 * (cov + cov.transpose());
        p.weight = rng.next_in(0.2, 1.8);
        mixture.components.push_back(std::move(p));
    }
    return mixture;
}

} // namespace ghap::testing
