#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bowae {

/// Root-to-leaf path of one word. nodes[k] is the k-th internal node
/// visited (nodes[0] is the root) and bits[k] the branch taken there:
/// 0 = left, 1 = right.
struct CodePath {
    std::span<const std::int32_t> nodes;
    std::span<const std::uint8_t> bits;

    std::size_t depth() const { return nodes.size(); }
};

/// Complete binary tree over V words with a seeded random leaf assignment.
///
/// The tree is heap-shaped: internal nodes are numbered breadth-first
/// 0..V-2, node i has children 2i+1 (left) and 2i+2 (right), and heap
/// slots V-1..2V-2 are the leaves. Every depth is floor(log2 V) or
/// ceil(log2 V). Words are placed on leaf slots by a Fisher-Yates shuffle
/// driven by Rng(seed), so the tree is a pure function of (V, seed).
class CodeTree {
public:
    CodeTree() = default;
    CodeTree(std::size_t vocab_size, std::uint64_t seed);

    std::size_t vocab_size() const { return vocab_size_; }
    std::size_t internal_count() const { return vocab_size_ == 0 ? 0 : vocab_size_ - 1; }
    std::uint64_t seed() const { return seed_; }

    /// Throws IndexError if word >= V.
    CodePath path(std::int32_t word) const;

    /// Largest path length, i.e. ceil(log2 V).
    std::size_t max_depth() const { return max_depth_; }

private:
    std::size_t vocab_size_ = 0;
    std::uint64_t seed_ = 0;
    std::size_t max_depth_ = 0;
    // Paths of all words, concatenated; word w occupies [offsets_[w], offsets_[w+1]).
    std::vector<std::size_t> offsets_;
    std::vector<std::int32_t> nodes_;
    std::vector<std::uint8_t> bits_;
};

/// Throws if V == 0.
CodeTree build_random_tree(std::size_t vocab_size, std::uint64_t seed);

}  // namespace bowae
