#include "ghap/kdtree.hpp"

#include "ghap/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace ghap {

namespace {

int widest_axis(const std::vector<Eigen::VectorXd>& centers,
                const std::size_t* first, const std::size_t* last) {
    const Eigen::Index dim = centers[*first].size();
    Eigen::VectorXd lo = centers[*first];
    Eigen::VectorXd hi = centers[*first];
    for (const std::size_t* it = first; it != last; ++it) {
        lo = lo.cwiseMin(centers[*it]);
        hi = hi.cwiseMax(centers[*it]);
    }
    int axis = 0;
    double best = -1.0;
    for (Eigen::Index a = 0; a < dim; ++a) {
        const double spread = hi[a] - lo[a];
        if (spread > best) {
            best = spread;
            axis = static_cast<int>(a);
        }
    }
    return axis;
}

void split_recursive(const std::vector<Eigen::VectorXd>& centers,
                     std::size_t* first, std::size_t* last, int levels_left,
                     int level, SplitAxisRule rule,
                     std::vector<std::vector<std::size_t>>& out) {
    const std::size_t count = static_cast<std::size_t>(last - first);
    if (levels_left == 0) {
        std::vector<std::size_t> leaf(first, last);
        std::sort(leaf.begin(), leaf.end());
        out.push_back(std::move(leaf));
        return;
    }

    const int axis = (rule == SplitAxisRule::cycle)
                         ? level % static_cast<int>(centers[*first].size())
                         : widest_axis(centers, first, last);

    // Left child takes ceil(count / 2) indices: everything strictly below the
    // lower median, then median-valued ties in ascending index order.
    const std::size_t left_count = (count + 1) / 2;
    std::nth_element(first, first + left_count, last,
                     [&](std::size_t a, std::size_t b) {
                         const double ca = centers[a][axis];
                         const double cb = centers[b][axis];
                         if (ca != cb) {
                             return ca < cb;
                         }
                         return a < b;
                     });

    split_recursive(centers, first, first + left_count, levels_left - 1, level + 1, rule, out);
    split_recursive(centers, first + left_count, last, levels_left - 1, level + 1, rule, out);
}

} // namespace

int depth_for(std::size_t n, std::size_t s) {
    if (n == 0 || s == 0) {
        throw NumericError("depth_for: n and s must be positive");
    }
    int depth = 0;
    // Largest d with s * 2^d <= n.
    while (s <= n / 2) {
        s <<= 1;
        ++depth;
    }
    return depth;
}

BlockPartition build_partition(const std::vector<Eigen::VectorXd>& centers,
                               std::size_t s, SplitAxisRule rule) {
    if (centers.empty()) {
        throw NumericError("build_partition: no centers");
    }
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (!centers[i].allFinite()) {
            throw NumericError("build_partition: non-finite center " + std::to_string(i));
        }
    }

    BlockPartition partition;
    partition.n = centers.size();
    partition.depth = depth_for(centers.size(), s);

    std::vector<std::size_t> indices(centers.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        indices[i] = i;
    }
    partition.blocks.reserve(std::size_t{1} << partition.depth);
    split_recursive(centers, indices.data(), indices.data() + indices.size(),
                    partition.depth, 0, rule, partition.blocks);
    return partition;
}

} // namespace ghap
