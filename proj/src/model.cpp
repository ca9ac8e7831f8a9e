#include "bowae/model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "bowae/error.hpp"
#include "bowae/rng.hpp"

namespace bowae {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double a) {
    if (a >= 0.0) {
        return 1.0 / (1.0 + std::exp(-a));
    }
    const double e = std::exp(a);
    return e / (1.0 + e);
}

void check_word(const LanguageParams& side, std::int32_t word) {
    if (word < 0 || static_cast<std::size_t>(word) >= side.vocab_size()) {
        throw IndexError("word index " + std::to_string(word) + " out of range for vocabulary of size " +
                         std::to_string(side.vocab_size()));
    }
}

double preactivation(const LanguageParams& side, std::int32_t node, const Vector& hidden) {
    const auto n = static_cast<Eigen::Index>(node);
    return side.decoder_bias[n] + side.decoder_weights.row(n).dot(hidden);
}

Language other(Language lang) { return lang == Language::x ? Language::y : Language::x; }

Task task_for(Language source, Language target) {
    if (source == Language::x) {
        return target == Language::x ? Task::xx : Task::xy;
    }
    return target == Language::y ? Task::yy : Task::yx;
}

LanguageParams make_side(Vocabulary vocab, std::size_t dim, std::uint64_t tree_seed) {
    if (vocab.empty()) {
        throw Error("model vocabulary is empty");
    }
    LanguageParams side;
    const auto v = static_cast<Eigen::Index>(vocab.size());
    const auto d = static_cast<Eigen::Index>(dim);
    side.tree = CodeTree(vocab.size(), tree_seed);
    side.vocab = std::move(vocab);
    side.embeddings = Matrix::Zero(d, v);
    side.decoder_bias = Vector::Zero(v - 1);
    side.decoder_weights = RowMatrix::Zero(v - 1, d);
    return side;
}

// Sparse accumulator keyed by row/column id, in first-touch order.
class SlotMap {
public:
    std::size_t slot(std::int32_t key) {
        const auto [it, inserted] = slots_.try_emplace(key, keys_.size());
        if (inserted) {
            keys_.push_back(key);
        }
        return it->second;
    }
    const std::vector<std::int32_t>& keys() const { return keys_; }

private:
    std::unordered_map<std::int32_t, std::size_t> slots_;
    std::vector<std::int32_t> keys_;
};

}  // namespace

std::string_view to_string(Nonlinearity h) { return h == Nonlinearity::tanh ? "tanh" : "identity"; }

Nonlinearity parse_nonlinearity(std::string_view text) {
    if (text == "tanh") {
        return Nonlinearity::tanh;
    }
    if (text == "identity") {
        return Nonlinearity::identity;
    }
    throw Error("unknown nonlinearity: " + std::string(text));
}

BilingualModel BilingualModel::create(Vocabulary vocab_x, Vocabulary vocab_y, const ModelInit& init) {
    if (init.dim == 0) {
        throw Error("embedding dimension must be positive");
    }
    BilingualModel model;
    model.dim = init.dim;
    model.nonlinearity = init.nonlinearity;
    model.x = make_side(std::move(vocab_x), init.dim, init.tree_seed_x);
    model.y = make_side(std::move(vocab_y), init.dim, init.tree_seed_y);
    model.hidden_bias = Vector::Zero(static_cast<Eigen::Index>(init.dim));

    Rng rng(init.init_seed);
    for (Matrix* w : {&model.x.embeddings, &model.y.embeddings}) {
        double* data = w->data();
        for (Eigen::Index i = 0; i < w->size(); ++i) {
            data[i] = rng.uniform(-init.init_range, init.init_range);
        }
    }
    return model;
}

std::vector<ParameterBlock> parameter_blocks(BilingualModel& model) {
    const auto span_of = [](auto& m) { return std::span<double>(m.data(), static_cast<std::size_t>(m.size())); };
    return {
        {"W_x", span_of(model.x.embeddings)},      {"W_y", span_of(model.y.embeddings)},
        {"c", span_of(model.hidden_bias)},         {"b_x", span_of(model.x.decoder_bias)},
        {"U_x", span_of(model.x.decoder_weights)}, {"b_y", span_of(model.y.decoder_bias)},
        {"U_y", span_of(model.y.decoder_weights)},
    };
}

BilingualModel zeros_like(const BilingualModel& model) {
    BilingualModel zero = model;
    for (auto& block : parameter_blocks(zero)) {
        std::fill(block.values.begin(), block.values.end(), 0.0);
    }
    return zero;
}

EncodedSentence encode(const BagOfWords& bag, Language lang, const BilingualModel& model) {
    const auto& side = model.side(lang);
    EncodedSentence enc;
    enc.source = lang;
    enc.phi = Vector::Zero(static_cast<Eigen::Index>(model.dim));
    for (const WordId id : bag.indices) {
        check_word(side, id);
        enc.phi += side.embeddings.col(id);
    }
    enc.hidden = model.hidden_bias + enc.phi;
    if (model.nonlinearity == Nonlinearity::tanh) {
        enc.hidden = enc.hidden.array().tanh().matrix();
    }
    return enc;
}

double branch_prob(std::int32_t node, const Vector& hidden, Language lang, const BilingualModel& model) {
    const auto& side = model.side(lang);
    if (node < 0 || static_cast<std::size_t>(node) >= side.tree.internal_count()) {
        throw IndexError("internal node " + std::to_string(node) + " out of range");
    }
    return sigmoid(preactivation(side, node, hidden));
}

double word_log_prob(std::int32_t word, const Vector& hidden, Language lang, const BilingualModel& model) {
    const auto& side = model.side(lang);
    const CodePath path = side.tree.path(word);
    double log_p = 0.0;
    for (std::size_t k = 0; k < path.depth(); ++k) {
        const double a = preactivation(side, path.nodes[k], hidden);
        // log sigm(a) = -softplus(-a); log(1 - sigm(a)) = -softplus(a)
        log_p -= softplus(path.bits[k] ? -a : a);
    }
    return log_p;
}

double recon_loss(const BagOfWords& target, Language target_lang, const EncodedSentence& enc,
                  const BilingualModel& model, DecoderTouchCounter* counter) {
    const auto& tree = model.side(target_lang).tree;
    double loss = 0.0;
    for (const WordId id : target.indices) {
        loss -= word_log_prob(id, enc.hidden, target_lang, model);
        if (counter != nullptr) {
            counter->rows += tree.path(id).depth();
        }
    }
    return loss;
}

PairLoss pair_loss(const SentencePair& pair, const BilingualModel& model, const TaskWeights& weights) {
    const EncodedSentence enc_x = encode(pair.source, Language::x, model);
    const EncodedSentence enc_y = encode(pair.target, Language::y, model);
    PairLoss loss;
    loss.parts[static_cast<std::size_t>(Task::xx)] = recon_loss(pair.source, Language::x, enc_x, model);
    loss.parts[static_cast<std::size_t>(Task::yy)] = recon_loss(pair.target, Language::y, enc_y, model);
    loss.parts[static_cast<std::size_t>(Task::xy)] = recon_loss(pair.target, Language::y, enc_x, model);
    loss.parts[static_cast<std::size_t>(Task::yx)] = recon_loss(pair.source, Language::x, enc_y, model);
    for (std::size_t t = 0; t < 4; ++t) {
        loss.total += weights[t] * loss.parts[t];
    }
    return loss;
}

PairGradients pair_gradients(const SentencePair& pair, const BilingualModel& model, const TaskWeights& weights) {
    const auto d = static_cast<Eigen::Index>(model.dim);
    PairGradients grads;
    grads.hidden_bias = Vector::Zero(d);

    // Decoder contributions are gathered per touched row, then packed.
    struct DecoderAccum {
        SlotMap slots;
        std::vector<double> bias;
        std::vector<Vector> weights;
    };
    std::array<DecoderAccum, 2> decoders;

    const std::array<const BagOfWords*, 2> bags{&pair.source, &pair.target};
    for (const Language source : {Language::x, Language::y}) {
        const BagOfWords& source_bag = *bags[static_cast<std::size_t>(source)];
        const EncodedSentence enc = encode(source_bag, source, model);
        Vector d_hidden = Vector::Zero(d);
        bool used = false;

        for (const Language target : {source, other(source)}) {
            const auto task = static_cast<std::size_t>(task_for(source, target));
            const double weight = weights[task];
            if (weight == 0.0) {
                continue;
            }
            used = true;
            const LanguageParams& side = model.side(target);
            DecoderAccum& accum = decoders[static_cast<std::size_t>(target)];
            double task_loss = 0.0;
            for (const WordId id : bags[static_cast<std::size_t>(target)]->indices) {
                const CodePath path = side.tree.path(id);
                for (std::size_t k = 0; k < path.depth(); ++k) {
                    const std::int32_t node = path.nodes[k];
                    const double a = preactivation(side, node, enc.hidden);
                    const double bit = path.bits[k];
                    task_loss += softplus(bit != 0.0 ? -a : a);
                    // d(-log p(bit)) / da = sigm(a) - bit
                    const double g = weight * (sigmoid(a) - bit);
                    const std::size_t slot = accum.slots.slot(node);
                    if (slot == accum.bias.size()) {
                        accum.bias.push_back(0.0);
                        accum.weights.push_back(Vector::Zero(d));
                    }
                    accum.bias[slot] += g;
                    accum.weights[slot] += g * enc.hidden;
                    d_hidden += g * side.decoder_weights.row(node).transpose();
                }
            }
            grads.loss.parts[task] = task_loss;
        }
        if (!used) {
            continue;
        }

        Vector d_pre = d_hidden;
        if (model.nonlinearity == Nonlinearity::tanh) {
            d_pre = d_hidden.array() * (1.0 - enc.hidden.array().square());
        }
        grads.hidden_bias += d_pre;

        SlotMap word_slots;
        std::vector<int> multiplicity;
        for (const WordId id : source_bag.indices) {
            const std::size_t slot = word_slots.slot(id);
            if (slot == multiplicity.size()) {
                multiplicity.push_back(0);
            }
            ++multiplicity[slot];
        }
        EmbeddingGradient& emb = grads.embeddings(source);
        emb.words = word_slots.keys();
        emb.columns.resize(d, static_cast<Eigen::Index>(emb.words.size()));
        for (std::size_t i = 0; i < emb.words.size(); ++i) {
            emb.columns.col(static_cast<Eigen::Index>(i)) = static_cast<double>(multiplicity[i]) * d_pre;
        }
    }

    // Tasks skipped above still report their loss.
    if (std::find(weights.begin(), weights.end(), 0.0) != weights.end()) {
        const PairLoss full = pair_loss(pair, model, weights);
        for (std::size_t t = 0; t < 4; ++t) {
            if (weights[t] == 0.0) {
                grads.loss.parts[t] = full.parts[t];
            }
        }
    }
    for (std::size_t t = 0; t < 4; ++t) {
        grads.loss.total += weights[t] * grads.loss.parts[t];
    }

    for (const Language lang : {Language::x, Language::y}) {
        DecoderAccum& accum = decoders[static_cast<std::size_t>(lang)];
        DecoderGradient& dec = grads.decoder(lang);
        dec.nodes = accum.slots.keys();
        const auto n = static_cast<Eigen::Index>(dec.nodes.size());
        dec.bias.resize(n);
        dec.weights.resize(n, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            dec.bias[i] = accum.bias[static_cast<std::size_t>(i)];
            dec.weights.row(i) = accum.weights[static_cast<std::size_t>(i)].transpose();
        }
        if (grads.embeddings(lang).columns.rows() != d) {
            grads.embeddings(lang).columns.resize(d, 0);
        }
    }
    return grads;
}

std::optional<std::string> first_non_finite(const PairGradients& grads) {
    if (!grads.embeddings_x.columns.allFinite()) {
        return "W_x";
    }
    if (!grads.embeddings_y.columns.allFinite()) {
        return "W_y";
    }
    if (!grads.hidden_bias.allFinite()) {
        return "c";
    }
    if (!grads.decoder_x.bias.allFinite()) {
        return "b_x";
    }
    if (!grads.decoder_x.weights.allFinite()) {
        return "U_x";
    }
    if (!grads.decoder_y.bias.allFinite()) {
        return "b_y";
    }
    if (!grads.decoder_y.weights.allFinite()) {
        return "U_y";
    }
    return std::nullopt;
}

BilingualModel to_dense(const PairGradients& grads, const BilingualModel& model) {
    BilingualModel dense = zeros_like(model);
    apply_sgd(dense, grads, -1.0);
    return dense;
}

void apply_sgd(BilingualModel& model, const PairGradients& grads, double learning_rate) {
    for (const Language lang : {Language::x, Language::y}) {
        LanguageParams& side = model.side(lang);
        const EmbeddingGradient& emb = grads.embeddings(lang);
        for (std::size_t i = 0; i < emb.words.size(); ++i) {
            side.embeddings.col(emb.words[i]) -= learning_rate * emb.columns.col(static_cast<Eigen::Index>(i));
        }
        const DecoderGradient& dec = grads.decoder(lang);
        for (std::size_t i = 0; i < dec.nodes.size(); ++i) {
            const auto row = static_cast<Eigen::Index>(i);
            side.decoder_bias[dec.nodes[i]] -= learning_rate * dec.bias[row];
            side.decoder_weights.row(dec.nodes[i]) -= learning_rate * dec.weights.row(row);
        }
    }
    model.hidden_bias -= learning_rate * grads.hidden_bias;
}

}  // namespace bowae
