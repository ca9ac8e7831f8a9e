#include "bowae/code_tree.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "bowae/error.hpp"
#include "bowae/rng.hpp"

namespace bowae {

CodeTree::CodeTree(std::size_t vocab_size, std::uint64_t seed) : vocab_size_(vocab_size), seed_(seed) {
    if (vocab_size == 0) {
        throw Error("code tree needs at least one word");
    }
    std::vector<std::int32_t> leaf_word(vocab_size);
    std::iota(leaf_word.begin(), leaf_word.end(), 0);
    Rng rng(seed);
    rng.shuffle(std::span<std::int32_t>(leaf_word));

    // Collect each leaf slot's path bottom-up, then store it root-first under its word.
    std::vector<std::vector<std::int32_t>> word_nodes(vocab_size);
    std::vector<std::vector<std::uint8_t>> word_bits(vocab_size);
    const std::size_t first_leaf = vocab_size - 1;
    for (std::size_t slot = 0; slot < vocab_size; ++slot) {
        auto& nodes = word_nodes[static_cast<std::size_t>(leaf_word[slot])];
        auto& bits = word_bits[static_cast<std::size_t>(leaf_word[slot])];
        std::size_t heap = first_leaf + slot;
        while (heap > 0) {
            const std::size_t parent = (heap - 1) / 2;
            nodes.push_back(static_cast<std::int32_t>(parent));
            bits.push_back(heap == 2 * parent + 2 ? 1 : 0);
            heap = parent;
        }
        std::reverse(nodes.begin(), nodes.end());
        std::reverse(bits.begin(), bits.end());
    }

    offsets_.assign(vocab_size + 1, 0);
    for (std::size_t w = 0; w < vocab_size; ++w) {
        offsets_[w + 1] = offsets_[w] + word_nodes[w].size();
        max_depth_ = std::max(max_depth_, word_nodes[w].size());
    }
    nodes_.reserve(offsets_.back());
    bits_.reserve(offsets_.back());
    for (std::size_t w = 0; w < vocab_size; ++w) {
        nodes_.insert(nodes_.end(), word_nodes[w].begin(), word_nodes[w].end());
        bits_.insert(bits_.end(), word_bits[w].begin(), word_bits[w].end());
    }
}

CodePath CodeTree::path(std::int32_t word) const {
    if (word < 0 || static_cast<std::size_t>(word) >= vocab_size_) {
        throw IndexError("word " + std::to_string(word) + " out of range for tree over " +
                         std::to_string(vocab_size_) + " words");
    }
    const auto begin = offsets_[static_cast<std::size_t>(word)];
    const auto length = offsets_[static_cast<std::size_t>(word) + 1] - begin;
    return {std::span<const std::int32_t>(nodes_).subspan(begin, length),
            std::span<const std::uint8_t>(bits_).subspan(begin, length)};
}

CodeTree build_random_tree(std::size_t vocab_size, std::uint64_t seed) {
    return CodeTree(vocab_size, seed);
}

}  // namespace bowae
