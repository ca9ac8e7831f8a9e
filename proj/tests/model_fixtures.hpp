#pragma once

#include "bowae/model.hpp"
#include "bowae/rng.hpp"

namespace fixtures {

/// Model over index vocabularies with every parameter drawn from N(0, scale^2).
inline bowae::BilingualModel random_model(std::size_t vx, std::size_t vy, std::size_t dim, std::uint64_t seed,
                                          bowae::Nonlinearity h = bowae::Nonlinearity::tanh, double scale = 0.5) {
    bowae::ModelInit init;
    init.dim = dim;
    init.nonlinearity = h;
    init.init_seed = seed;
    init.tree_seed_x = seed + 100;
    init.tree_seed_y = seed + 200;
    auto model = bowae::BilingualModel::create(bowae::make_index_vocabulary(vx), bowae::make_index_vocabulary(vy),
                                               init);
    bowae::Rng rng(seed * 7919 + 1);
    for (auto& block : bowae::parameter_blocks(model)) {
        for (double& v : block.values) {
            v = scale * rng.normal();
        }
    }
    return model;
}

/// Model with zero decoders and zero hidden bias.
inline bowae::BilingualModel zero_decoder_model(std::size_t vx, std::size_t vy, std::size_t dim,
                                                std::uint64_t seed = 1,
                                                bowae::Nonlinearity h = bowae::Nonlinearity::tanh) {
    bowae::ModelInit init;
    init.dim = dim;
    init.nonlinearity = h;
    init.init_seed = seed;
    init.tree_seed_x = seed + 100;
    init.tree_seed_y = seed + 200;
    return bowae::BilingualModel::create(bowae::make_index_vocabulary(vx), bowae::make_index_vocabulary(vy), init);
}

inline bowae::BagOfWords random_bag(bowae::Rng& rng, std::size_t vocab, std::size_t max_len) {
    bowae::BagOfWords bag;
    const auto len = rng.below(max_len + 1);
    for (std::uint64_t i = 0; i < len; ++i) {
        bag.indices.push_back(static_cast<bowae::WordId>(rng.below(vocab)));
    }
    return bag;
}

}  // namespace fixtures
