#include "bowae/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "bowae/error.hpp"
#include "bowae/rng.hpp"

namespace bowae {

namespace {

std::string padded(char prefix, std::size_t index, std::size_t total) {
    std::string digits = std::to_string(index);
    const std::size_t width = std::to_string(total > 0 ? total - 1 : 0).size();
    return std::string(1, prefix) + std::string(width - std::min(width, digits.size()), '0') + digits;
}

// Cumulative distribution sampler.
class Categorical {
public:
    explicit Categorical(const std::vector<double>& weights) : cumulative_(weights.size()) {
        std::partial_sum(weights.begin(), weights.end(), cumulative_.begin());
    }

    std::size_t sample(Rng& rng) const {
        const double u = rng.uniform() * cumulative_.back();
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
    }

private:
    std::vector<double> cumulative_;
};

std::size_t sample_length(Rng& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

void write_lines(const std::filesystem::path& path, const std::vector<Tokens>& lines) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    for (const auto& line : lines) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            out << (i ? " " : "") << line[i];
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

void write_documents(const std::filesystem::path& path, const std::vector<LabeledLine>& docs) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    for (const auto& doc : docs) {
        out << doc.label << '\t';
        for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
            out << (i ? " " : "") << doc.tokens[i];
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

}  // namespace

SynthCorpus generate_synthetic(const SynthConfig& config) {
    if (config.vocab_size < 2 || config.topics < 1) {
        throw Error("synthetic corpus needs at least 2 words and 1 topic");
    }
    if (config.sentence_min_len < 1 || config.sentence_min_len > config.sentence_max_len ||
        config.document_min_len < 1 || config.document_min_len > config.document_max_len) {
        throw Error("invalid length range for synthetic corpus");
    }
    const std::size_t v = config.vocab_size;
    SynthCorpus corpus;
    for (std::size_t i = 0; i < v; ++i) {
        corpus.words_x.push_back(padded('x', i, v));
        corpus.words_y.push_back(padded('y', i, v));
    }

    Rng structure_rng(derive_seed(config.seed, 0));
    corpus.translation.resize(v);
    std::iota(corpus.translation.begin(), corpus.translation.end(), std::size_t{0});
    structure_rng.shuffle(std::span<std::size_t>(corpus.translation));

    std::vector<Categorical> topics;
    std::vector<std::size_t> ranking(v);
    for (std::size_t t = 0; t < config.topics; ++t) {
        std::iota(ranking.begin(), ranking.end(), std::size_t{0});
        structure_rng.shuffle(std::span<std::size_t>(ranking));
        std::vector<double> weights(v);
        for (std::size_t r = 0; r < v; ++r) {
            weights[ranking[r]] = 1.0 / std::pow(static_cast<double>(r + 1), config.zipf_exponent);
        }
        topics.emplace_back(weights);
    }

    const auto sample_words = [&](Rng& rng, std::size_t topic, std::size_t length) {
        std::vector<std::size_t> words(length);
        for (auto& w : words) {
            w = topics[topic].sample(rng);
        }
        return words;
    };

    Rng sentence_rng(derive_seed(config.seed, 1));
    for (std::size_t s = 0; s < config.sentences; ++s) {
        const auto topic = static_cast<std::size_t>(sentence_rng.below(config.topics));
        const std::size_t length = sample_length(sentence_rng, config.sentence_min_len, config.sentence_max_len);
        std::vector<std::size_t> words = sample_words(sentence_rng, topic, length);
        Tokens x_line;
        for (const auto w : words) {
            x_line.push_back(corpus.words_x[w]);
        }
        // The translation uses a different word order.
        sentence_rng.shuffle(std::span<std::size_t>(words));
        Tokens y_line;
        for (const auto w : words) {
            y_line.push_back(corpus.words_y[corpus.translation[w]]);
        }
        corpus.sentences_x.push_back(std::move(x_line));
        corpus.sentences_y.push_back(std::move(y_line));
    }

    for (const Language lang : {Language::x, Language::y}) {
        Rng doc_rng(derive_seed(config.seed, lang == Language::x ? 2 : 3));
        auto& docs = lang == Language::x ? corpus.documents_x : corpus.documents_y;
        for (std::size_t d = 0; d < config.documents; ++d) {
            const auto topic = static_cast<std::size_t>(doc_rng.below(config.topics));
            const std::size_t length = sample_length(doc_rng, config.document_min_len, config.document_max_len);
            LabeledLine doc;
            doc.label = "T" + std::to_string(topic);
            for (const auto w : sample_words(doc_rng, topic, length)) {
                doc.tokens.push_back(lang == Language::x ? corpus.words_x[w] : corpus.words_y[corpus.translation[w]]);
            }
            docs.push_back(std::move(doc));
        }
    }
    return corpus;
}

SynthFiles synth_file_names(const std::filesystem::path& dir) {
    return {dir / "parallel.x.txt", dir / "parallel.y.txt", dir / "docs.x.tsv", dir / "docs.y.tsv",
            dir / "translations.tsv"};
}

SynthFiles write_synthetic(const SynthCorpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const SynthFiles files = synth_file_names(dir);
    write_lines(files.parallel_x, corpus.sentences_x);
    write_lines(files.parallel_y, corpus.sentences_y);
    write_documents(files.documents_x, corpus.documents_x);
    write_documents(files.documents_y, corpus.documents_y);
    std::vector<Tokens> pairs;
    for (std::size_t i = 0; i < corpus.words_x.size(); ++i) {
        pairs.push_back({corpus.words_x[i] + "\t" + corpus.words_y[corpus.translation[i]]});
    }
    write_lines(files.translations, pairs);
    return files;
}

}  // namespace bowae
