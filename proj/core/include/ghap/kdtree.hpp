#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace ghap {

enum class SplitAxisRule {
    largest_spread, // split along the coordinate with the largest max-min
    cycle,          // classic axis cycling: axis = level % dim
};

/// Leaf assignment of primitive indices to 2^depth spatial blocks. Blocks are
/// pairwise disjoint, cover [0, n), appear in depth-first left-to-right leaf
/// order, and each holds between floor(n / 2^depth) and ceil(n / 2^depth)
/// indices (indices within a block are sorted ascending).
struct BlockPartition {
    int depth = 0;
    std::size_t n = 0;
    std::vector<std::vector<std::size_t>> blocks;
};

/// Tree depth rule: max(0, floor(log2(n / s))) for block capacity s.
/// Integer arithmetic throughout, so no rounding surprises near powers of two.
int depth_for(std::size_t n, std::size_t s);

/// Recursive balanced median splits over the centers down to depth_for(n, s).
/// At each node the split coordinate follows `rule`; indices strictly below
/// the median value go left and ties are resolved by ascending original
/// index, which makes the partition deterministic and reproducible.
/// Throws NumericError when a center has a non-finite coordinate.
///
/// Blocks can hold up to ceil(n / 2^depth) indices, which exceeds s when
/// n / s is not a power of two; callers get O(s)-sized blocks, not a hard cap.
BlockPartition build_partition(const std::vector<Eigen::VectorXd>& centers,
                               std::size_t s,
                               SplitAxisRule rule = SplitAxisRule::largest_spread);

} // namespace ghap
