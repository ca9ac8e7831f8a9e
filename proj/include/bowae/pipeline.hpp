#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bowae/classifier.hpp"
#include "bowae/corpus.hpp"
#include "bowae/model.hpp"

namespace bowae {

struct CrossLingualOptions {
    /// Documents of this language train the classifier; the other language is tested.
    Language train_language = Language::x;
    /// Unset: pick tfidf or binary by validation error (ties go to tfidf).
    std::optional<WeightMode> mode;
    double train_fraction = 0.70;
    double valid_fraction = 0.15;
    SvmOptions svm;
};

struct CrossLingualResult {
    LinearSVM svm;
    ClassificationReport test;
    LabelSet labels;
    std::size_t train_documents = 0;
    std::size_t valid_documents = 0;
    std::size_t test_documents = 0;
};

/// Cross-lingual document classification with the model's embeddings.
///
/// Each language's documents are weighted (document frequencies over that
/// language's whole list) and split train/valid/test in list order. The
/// classifier is fit on the train split of the training language, C and
/// the weighting mode are chosen on its valid split, and the result is
/// evaluated on the test split of the other language.
CrossLingualResult run_cross_lingual(const BilingualModel& model, const std::vector<LabeledLine>& documents_x,
                                     const std::vector<LabeledLine>& documents_y,
                                     const CrossLingualOptions& options = {});

}  // namespace bowae
