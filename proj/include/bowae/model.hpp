#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bowae/code_tree.hpp"
#include "bowae/corpus.hpp"

namespace bowae {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Nonlinearity { tanh, identity };

std::string_view to_string(Nonlinearity h);
Nonlinearity parse_nonlinearity(std::string_view text);

/// Parameters owned by one language: its word embeddings (encoder side)
/// and its tree decoder.
struct LanguageParams {
    Vocabulary vocab;
    CodeTree tree;
    /// D x V; column w is the embedding of word w.
    Matrix embeddings;
    /// One bias per internal tree node (V-1).
    Vector decoder_bias;
    /// (V-1) x D; row n scores the right branch at internal node n.
    RowMatrix decoder_weights;

    std::size_t vocab_size() const { return vocab.size(); }
};

struct ModelInit {
    std::size_t dim = 40;
    Nonlinearity nonlinearity = Nonlinearity::tanh;
    std::uint64_t init_seed = 1;
    std::uint64_t tree_seed_x = 2;
    std::uint64_t tree_seed_y = 3;
    /// Embedding entries are drawn from uniform(-init_range, init_range).
    double init_range = 0.05;
};

/// Bilingual bag-of-words autoencoder. Each language has its own
/// embeddings and decoder; the hidden bias is shared by every direction.
struct BilingualModel {
    std::size_t dim = 0;
    Nonlinearity nonlinearity = Nonlinearity::tanh;
    LanguageParams x;
    LanguageParams y;
    /// Shared hidden bias c (D).
    Vector hidden_bias;

    /// Random embeddings, zero decoders and zero hidden bias.
    static BilingualModel create(Vocabulary vocab_x, Vocabulary vocab_y, const ModelInit& init);

    LanguageParams& side(Language lang) { return lang == Language::x ? x : y; }
    const LanguageParams& side(Language lang) const { return lang == Language::x ? x : y; }
};

/// Named view over one parameter array, in storage order (embeddings are
/// column-major, decoder weights row-major).
struct ParameterBlock {
    std::string name;
    std::span<double> values;
};

/// W_x, W_y, c, b_x, U_x, b_y, U_y in that order.
std::vector<ParameterBlock> parameter_blocks(BilingualModel& model);

/// Copy of the model with every parameter set to zero.
BilingualModel zeros_like(const BilingualModel& model);

// ---------------------------------------------------------------------------
// Forward pass

struct EncodedSentence {
    /// Sum of the bag's embedding columns.
    Vector phi;
    /// h(c + phi).
    Vector hidden;
    Language source = Language::x;
};

EncodedSentence encode(const BagOfWords& bag, Language lang, const BilingualModel& model);

/// Probability of branching right at an internal node of `lang`'s tree.
double branch_prob(std::int32_t node, const Vector& hidden, Language lang, const BilingualModel& model);

/// log p(word | hidden) as a sum of log-sigmoids along the word's path.
double word_log_prob(std::int32_t word, const Vector& hidden, Language lang, const BilingualModel& model);

/// Counts decoder rows read while scoring.
struct DecoderTouchCounter {
    std::size_t rows = 0;
};

/// Negative log-likelihood of every token occurrence of `target` under the
/// decoder of `target_lang`, conditioned on `enc`.
double recon_loss(const BagOfWords& target, Language target_lang, const EncodedSentence& enc,
                  const BilingualModel& model, DecoderTouchCounter* counter = nullptr);

/// The four reconstruction directions of a sentence pair.
enum class Task : std::size_t { xx = 0, yy = 1, xy = 2, yx = 3 };

using TaskWeights = std::array<double, 4>;
inline constexpr TaskWeights kEqualTaskWeights{1.0, 1.0, 1.0, 1.0};

struct PairLoss {
    /// Weighted sum of the parts.
    double total = 0.0;
    /// Unweighted losses of x->x, y->y, x->y, y->x.
    std::array<double, 4> parts{};
};

PairLoss pair_loss(const SentencePair& pair, const BilingualModel& model,
                   const TaskWeights& weights = kEqualTaskWeights);

// ---------------------------------------------------------------------------
// Gradients

/// Gradient of the embedding columns a pair touched.
struct EmbeddingGradient {
    std::vector<WordId> words;
    /// D x words.size(); column i belongs to words[i].
    Matrix columns;
};

/// Gradient of the decoder rows a pair touched.
struct DecoderGradient {
    std::vector<std::int32_t> nodes;
    Vector bias;
    /// nodes.size() x D; row i belongs to nodes[i].
    RowMatrix weights;
};

struct PairGradients {
    PairLoss loss;
    EmbeddingGradient embeddings_x;
    EmbeddingGradient embeddings_y;
    Vector hidden_bias;
    DecoderGradient decoder_x;
    DecoderGradient decoder_y;

    EmbeddingGradient& embeddings(Language lang) { return lang == Language::x ? embeddings_x : embeddings_y; }
    const EmbeddingGradient& embeddings(Language lang) const {
        return lang == Language::x ? embeddings_x : embeddings_y;
    }
    DecoderGradient& decoder(Language lang) { return lang == Language::x ? decoder_x : decoder_y; }
    const DecoderGradient& decoder(Language lang) const { return lang == Language::x ? decoder_x : decoder_y; }
};

/// Exact gradients of pair_loss(pair, model, weights).total. Tasks with a
/// zero weight are skipped entirely.
PairGradients pair_gradients(const SentencePair& pair, const BilingualModel& model,
                             const TaskWeights& weights = kEqualTaskWeights);

/// Name of the first gradient block holding a NaN or Inf, if any.
std::optional<std::string> first_non_finite(const PairGradients& grads);

/// Scatters the sparse gradients into a zero model of the same shape.
BilingualModel to_dense(const PairGradients& grads, const BilingualModel& model);

/// parameters -= learning_rate * grads, touching only the listed rows and columns.
void apply_sgd(BilingualModel& model, const PairGradients& grads, double learning_rate);

}  // namespace bowae
