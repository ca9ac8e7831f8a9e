#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bowae/corpus.hpp"
#include "bowae/model.hpp"

namespace bowae {

/// Document vector W * weights. No hidden bias and no nonlinearity.
struct DocEmbedding {
    Vector vector;
    int label = 0;
    Language language = Language::x;
    bool degenerate = false;
};

/// Throws IndexError if a document references a column outside W.
std::vector<DocEmbedding> embed_documents(std::span<const Document> docs, const Matrix& embeddings);

/// One-vs-rest linear classifier: predict argmax_k (w_k . v + b_k), ties
/// resolved towards the lowest class id.
struct LinearSVM {
    /// K x D
    RowMatrix weights;
    Vector biases;
    double c = 1.0;
    WeightMode mode = WeightMode::tfidf;
    /// Error on the validation set used to select c.
    double validation_error = 0.0;

    std::size_t num_classes() const { return static_cast<std::size_t>(weights.rows()); }
    Vector scores(const Vector& v) const;
    int predict(const Vector& v) const;
};

struct SvmOptions {
    std::vector<double> c_grid{0.01, 0.1, 1.0, 10.0};
    std::size_t epochs = 50;
    std::uint64_t seed = 1;
};

/// Trains one L2-regularized hinge-loss classifier per class with a
/// fixed C. Solved by Pegasos-style stochastic sub-gradient descent on
/// features augmented with a constant 1 (so the bias is regularized too);
/// the returned weights average the iterates of the second half of training.
LinearSVM fit_svm(std::span<const DocEmbedding> train, double c, std::size_t num_classes,
                  const SvmOptions& options);

/// Fits one classifier per C in options.c_grid and keeps the one with the
/// lowest validation error (ties go to the smaller C). Throws if train
/// holds fewer than two distinct labels.
LinearSVM train_svm(std::span<const DocEmbedding> train, std::span<const DocEmbedding> valid,
                    const SvmOptions& options = {});

/// Fraction of misclassified documents; throws on empty input.
double error_rate(const LinearSVM& svm, std::span<const DocEmbedding> docs);

struct ClassificationReport {
    double error = 0.0;
    std::size_t total = 0;
    /// confusion[true][predicted]
    std::vector<std::vector<std::size_t>> confusion;
    std::vector<double> precision;
    std::vector<double> recall;
};

ClassificationReport evaluate(const LinearSVM& svm, std::span<const DocEmbedding> test);

/// Human-readable block: error rate, per-class precision/recall and the
/// confusion matrix. Class names come from `labels` when it covers them.
void write_report(std::ostream& out, const ClassificationReport& report, const LabelSet& labels);
/// Same content as `key=value` lines.
void write_report_kv(std::ostream& out, const ClassificationReport& report, const LabelSet& labels);

// ---------------------------------------------------------------------------
// Embedding-space queries

double cosine_similarity(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

struct Neighbor {
    WordId id = 0;
    std::string token;
    double similarity = 0.0;
};

/// The k target-language words whose embeddings have the highest cosine
/// similarity with `word`'s embedding; ties go to the lower index.
/// Throws IndexError naming an unknown word.
std::vector<Neighbor> nearest_neighbors(std::string_view word, Language source, Language target, std::size_t k,
                                        const BilingualModel& model);

/// Projects the rows of `points` (n x D) on their top-2 principal
/// directions after mean-centering. Each direction is oriented so that its
/// largest-magnitude coordinate is positive. Returns n x 2.
Matrix principal_projection(const Matrix& points);

struct ProjectedWord {
    std::string token;
    Language language = Language::x;
    double x = 0.0;
    double y = 0.0;
};

/// PCA projection of the top_n most frequent words of both languages,
/// language X first.
std::vector<ProjectedWord> project_2d(const BilingualModel& model, std::size_t top_n);

/// `token<TAB>lang<TAB>x<TAB>y` per line.
void write_projection(std::ostream& out, const std::vector<ProjectedWord>& points);

/// Header `<V> <D>`, then `<token> <v_1> ... <v_D>` per word.
void write_embeddings(std::ostream& out, const Vocabulary& vocab, const Matrix& embeddings);

struct EmbeddingTable {
    std::vector<std::string> tokens;
    /// D x V
    Matrix embeddings;
};

EmbeddingTable read_embeddings(std::istream& in);

}  // namespace bowae
