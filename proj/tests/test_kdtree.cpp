#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ghap/errors.hpp"
#include "ghap/kdtree.hpp"
#include "ghap/rng.hpp"

#include <algorithm>
#include <set>

using namespace ghap;

namespace {

std::vector<Eigen::VectorXd> random_centers(std::size_t n, int dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Eigen::VectorXd> centers;
    centers.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd c(dim);
        for (int a = 0; a < dim; ++a) {
            c[a] = rng.next_double();
        }
        centers.push_back(std::move(c));
    }
    return centers;
}

void check_invariants(const BlockPartition& partition) {
    CHECK(partition.blocks.size() == (std::size_t{1} << partition.depth));
    const std::size_t lo = partition.n >> partition.depth;
    const std::size_t hi = (partition.n + partition.blocks.size() - 1) / partition.blocks.size();
    std::set<std::size_t> seen;
    for (const auto& block : partition.blocks) {
        CHECK(block.size() >= lo);
        CHECK(block.size() <= hi);
        CHECK(std::is_sorted(block.begin(), block.end()));
        for (const std::size_t i : block) {
            CHECK(seen.insert(i).second); // disjoint
        }
    }
    CHECK(seen.size() == partition.n); // cover
}

} // namespace

TEST_CASE("depth rule") {
    CHECK(depth_for(100000, 1000) == 6);
    CHECK(depth_for(8, 2) == 2);
    CHECK(depth_for(5, 5) == 0);
    CHECK(depth_for(4, 10) == 0);
    CHECK(depth_for(1, 1) == 0);
    CHECK_THROWS_AS(depth_for(0, 3), NumericError);
}

TEST_CASE("four collinear points split down the middle") {
    std::vector<Eigen::VectorXd> centers;
    for (int i = 0; i < 4; ++i) {
        centers.push_back(Eigen::Vector2d(static_cast<double>(i), 0.0));
    }
    const BlockPartition partition = build_partition(centers, 2);
    REQUIRE(partition.depth == 1);
    REQUIRE(partition.blocks.size() == 2);
    CHECK(partition.blocks[0] == std::vector<std::size_t>{0, 1});
    CHECK(partition.blocks[1] == std::vector<std::size_t>{2, 3});
}

TEST_CASE("single point yields a single block") {
    std::vector<Eigen::VectorXd> centers{Eigen::Vector3d(1, 2, 3)};
    const BlockPartition partition = build_partition(centers, 8);
    CHECK(partition.depth == 0);
    REQUIRE(partition.blocks.size() == 1);
    CHECK(partition.blocks[0] == std::vector<std::size_t>{0});
}

TEST_CASE("1e5 uniform centers at capacity 1e3 give 64 nearly equal blocks") {
    const auto centers = random_centers(100000, 3, 42);
    const BlockPartition partition = build_partition(centers, 1000);
    CHECK(partition.depth == 6);
    REQUIRE(partition.blocks.size() == 64);
    for (const auto& block : partition.blocks) {
        CHECK(block.size() >= 1562);
        CHECK(block.size() <= 1563);
    }
    check_invariants(partition);
}

TEST_CASE("partition invariants hold on random inputs") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const std::size_t n = 37 + 113 * seed;
        const auto centers = random_centers(n, seed % 2 ? 2 : 3, seed);
        const BlockPartition partition = build_partition(centers, 10);
        check_invariants(partition);
    }
}

TEST_CASE("identical input produces identical partitions") {
    const auto centers = random_centers(500, 3, 7);
    const BlockPartition a = build_partition(centers, 50);
    const BlockPartition b = build_partition(centers, 50);
    CHECK(a.blocks == b.blocks);
}

TEST_CASE("generic inputs partition the same set of points under permutation") {
    const auto centers = random_centers(64, 2, 12);
    std::vector<std::size_t> perm(centers.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        perm[i] = i;
    }
    Rng rng(3);
    for (std::size_t i = perm.size(); i > 1; --i) {
        std::swap(perm[i - 1], perm[rng.next_below(i)]);
    }
    std::vector<Eigen::VectorXd> shuffled(centers.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        shuffled[i] = centers[perm[i]];
    }

    const BlockPartition original = build_partition(centers, 8);
    const BlockPartition permuted = build_partition(shuffled, 8);
    REQUIRE(original.blocks.size() == permuted.blocks.size());
    // Compare blocks as sets of points, mapping shuffled indices back.
    for (std::size_t b = 0; b < original.blocks.size(); ++b) {
        std::set<std::size_t> lhs(original.blocks[b].begin(), original.blocks[b].end());
        std::set<std::size_t> rhs;
        for (const std::size_t i : permuted.blocks[b]) {
            rhs.insert(perm[i]);
        }
        CHECK(lhs == rhs);
    }
}

TEST_CASE("cycling axis rule is available and keeps the invariants") {
    const auto centers = random_centers(200, 3, 9);
    const BlockPartition partition = build_partition(centers, 25, SplitAxisRule::cycle);
    check_invariants(partition);
}

TEST_CASE("non-finite centers are rejected with the offending index") {
    auto centers = random_centers(10, 2, 1);
    centers[7][1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(build_partition(centers, 4), doctest::Contains("center 7"),
                         NumericError);
}
