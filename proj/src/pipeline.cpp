#include "bowae/pipeline.hpp"

#include "bowae/error.hpp"

namespace bowae {

CrossLingualResult run_cross_lingual(const BilingualModel& model, const std::vector<LabeledLine>& documents_x,
                                     const std::vector<LabeledLine>& documents_y,
                                     const CrossLingualOptions& options) {
    std::vector<std::string> names;
    for (const auto* docs : {&documents_x, &documents_y}) {
        for (const auto& doc : *docs) {
            names.push_back(doc.label);
        }
    }
    CrossLingualResult result;
    result.labels = LabelSet(std::move(names));

    const Language train_lang = options.train_language;
    const Language test_lang = train_lang == Language::x ? Language::y : Language::x;
    const auto& train_lines = train_lang == Language::x ? documents_x : documents_y;
    const auto& test_lines = train_lang == Language::x ? documents_y : documents_x;
    if (train_lines.empty() || test_lines.empty()) {
        throw Error("both languages need labeled documents");
    }
    const std::vector<RawDocument> train_raw = to_raw_documents(train_lines, result.labels);
    const std::vector<RawDocument> test_raw = to_raw_documents(test_lines, result.labels);

    std::vector<WeightMode> modes{WeightMode::tfidf, WeightMode::binary};
    if (options.mode) {
        modes = {*options.mode};
    }
    bool have_best = false;
    for (const WeightMode mode : modes) {
        const DocumentSet source = tfidf(train_raw, model.side(train_lang).vocab, mode, train_lang);
        const DocumentSplits splits = split_documents(source.documents, options.train_fraction, options.valid_fraction);
        const auto train = embed_documents(splits.train, model.side(train_lang).embeddings);
        const auto valid = embed_documents(splits.valid, model.side(train_lang).embeddings);
        LinearSVM svm = train_svm(train, valid, options.svm);
        svm.mode = mode;
        if (!have_best || svm.validation_error < result.svm.validation_error) {
            result.svm = std::move(svm);
            result.train_documents = splits.train.size();
            result.valid_documents = splits.valid.size();
            have_best = true;
        }
    }

    const DocumentSet target = tfidf(test_raw, model.side(test_lang).vocab, result.svm.mode, test_lang);
    const DocumentSplits splits = split_documents(target.documents, options.train_fraction, options.valid_fraction);
    const auto test = embed_documents(splits.test, model.side(test_lang).embeddings);
    result.test_documents = test.size();
    result.test = evaluate(result.svm, test);
    return result;
}

}  // namespace bowae
