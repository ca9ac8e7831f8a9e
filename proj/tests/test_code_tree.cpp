#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>

#include "bowae/code_tree.hpp"
#include "bowae/error.hpp"
#include "oracles.hpp"

using namespace bowae;

namespace {

std::string bit_string(const CodePath& p) {
    std::string s;
    for (const auto b : p.bits) {
        s += b ? '1' : '0';
    }
    return s;
}

}  // namespace

TEST_CASE("single-word tree has an empty path") {
    const CodeTree tree = build_random_tree(1, 42);
    CHECK(tree.internal_count() == 0);
    const CodePath p = tree.path(0);
    CHECK(p.nodes.empty());
    CHECK(p.bits.empty());
}

TEST_CASE("two-word tree splits at the root") {
    const CodeTree tree = build_random_tree(2, 42);
    CHECK(tree.internal_count() == 1);
    const CodePath a = tree.path(0);
    const CodePath b = tree.path(1);
    REQUIRE(a.depth() == 1);
    REQUIRE(b.depth() == 1);
    CHECK(a.nodes[0] == 0);
    CHECK(b.nodes[0] == 0);
    CHECK(a.bits[0] != b.bits[0]);
}

TEST_CASE("V = 0 and out-of-range words are rejected") {
    CHECK_THROWS_AS(build_random_tree(0, 1), Error);
    const CodeTree tree = build_random_tree(4, 1);
    CHECK_THROWS_AS(tree.path(4), IndexError);
    CHECK_THROWS_AS(tree.path(-1), IndexError);
}

TEST_CASE("leaf depths match the level-by-level construction") {
    for (int v : {1, 2, 3, 5, 6, 7, 8, 9, 100, 1023, 1024, 1025}) {
        const CodeTree tree = build_random_tree(static_cast<std::size_t>(v), 17);
        std::vector<int> depths;
        for (int w = 0; w < v; ++w) {
            depths.push_back(static_cast<int>(tree.path(w).depth()));
        }
        std::sort(depths.begin(), depths.end());
        auto expected = oracle::complete_tree_leaf_depths(v);
        std::sort(expected.begin(), expected.end());
        CHECK_MESSAGE(depths == expected, "V=" << v);
    }
    // V = 5: three leaves at depth 2, two at depth 3.
    CHECK(oracle::complete_tree_leaf_depths(5) == std::vector<int>{2, 2, 2, 3, 3});
}

TEST_CASE("V = 8 codes are exactly {0,1}^3") {
    const CodeTree tree = build_random_tree(8, 99);
    std::set<std::string> codes;
    for (int w = 0; w < 8; ++w) {
        CHECK(tree.path(w).depth() == 3);
        codes.insert(bit_string(tree.path(w)));
    }
    CHECK(codes == std::set<std::string>{"000", "001", "010", "011", "100", "101", "110", "111"});
}

TEST_CASE("codes are prefix-free, complete and balanced") {
    for (std::size_t v = 1; v <= 1024; v = v < 40 ? v + 1 : v * 2 - 1) {
        const CodeTree tree = build_random_tree(v, v * 31 + 7);
        std::vector<std::string> codes;
        std::size_t min_depth = SIZE_MAX;
        std::size_t max_depth = 0;
        for (std::size_t w = 0; w < v; ++w) {
            const CodePath p = tree.path(static_cast<std::int32_t>(w));
            codes.push_back(bit_string(p));
            min_depth = std::min(min_depth, p.depth());
            max_depth = std::max(max_depth, p.depth());
            if (p.depth() > 0) {
                CHECK(p.nodes[0] == 0);
            }
            for (const auto n : p.nodes) {
                CHECK(n >= 0);
                CHECK(static_cast<std::size_t>(n) < tree.internal_count());
            }
        }
        CHECK(max_depth - min_depth <= 1);
        CHECK(max_depth == tree.max_depth());

        // Kraft sum on the common denominator 2^max_depth.
        std::uint64_t kraft = 0;
        for (const auto& c : codes) {
            kraft += std::uint64_t{1} << (max_depth - c.size());
        }
        CHECK(kraft == (std::uint64_t{1} << max_depth));

        // After sorting, a prefix can only be followed directly by a word it prefixes.
        std::sort(codes.begin(), codes.end());
        for (std::size_t i = 0; i + 1 < codes.size(); ++i) {
            CHECK_FALSE(codes[i + 1].rfind(codes[i], 0) == 0);
        }
    }
}

TEST_CASE("trees are a function of (V, seed)") {
    const CodeTree a = build_random_tree(37, 5);
    const CodeTree b = build_random_tree(37, 5);
    const CodeTree c = build_random_tree(37, 6);
    bool differs = false;
    for (int w = 0; w < 37; ++w) {
        CHECK(bit_string(a.path(w)) == bit_string(b.path(w)));
        CHECK(std::equal(a.path(w).nodes.begin(), a.path(w).nodes.end(), b.path(w).nodes.begin(),
                         b.path(w).nodes.end()));
        differs = differs || bit_string(a.path(w)) != bit_string(c.path(w));
    }
    CHECK(differs);
    CHECK(a.seed() == 5);
}

TEST_CASE("fixed seed gives a frozen assignment") {
    // Pins the portable RNG stream; a change here breaks checkpoint compatibility.
    const CodeTree tree = build_random_tree(4, 12345);
    std::vector<std::string> codes;
    for (int w = 0; w < 4; ++w) {
        codes.push_back(bit_string(tree.path(w)));
    }
    CHECK(codes == std::vector<std::string>{"00", "01", "11", "10"});
}
