#include "bowae/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "bowae/error.hpp"

namespace bowae {

Tokens tokenize(std::string_view line, bool lowercase) {
    Tokens tokens;
    std::size_t pos = 0;
    const auto is_space = [](char ch) {
        return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v';
    };
    while (pos < line.size()) {
        while (pos < line.size() && is_space(line[pos])) {
            ++pos;
        }
        std::size_t end = pos;
        while (end < line.size() && !is_space(line[end])) {
            ++end;
        }
        if (end > pos) {
            std::string token(line.substr(pos, end - pos));
            if (lowercase) {
                for (char& ch : token) {
                    if (ch >= 'A' && ch <= 'Z') {
                        ch = static_cast<char>(ch - 'A' + 'a');
                    }
                }
            }
            tokens.push_back(std::move(token));
        }
        pos = end;
    }
    return tokens;
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary(std::vector<std::pair<std::string, std::int64_t>> entries) {
    words_.reserve(entries.size());
    counts_.reserve(entries.size());
    index_.reserve(entries.size());
    for (auto& [token, count] : entries) {
        const auto id = static_cast<WordId>(words_.size());
        if (!index_.emplace(token, id).second) {
            throw Error("duplicate token in vocabulary: " + token);
        }
        words_.push_back(std::move(token));
        counts_.push_back(count);
    }
}

const std::string& Vocabulary::word(WordId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= words_.size()) {
        throw IndexError("word index " + std::to_string(id) + " out of range for vocabulary of size " +
                         std::to_string(words_.size()));
    }
    return words_[static_cast<std::size_t>(id)];
}

std::int64_t Vocabulary::count(WordId id) const {
    word(id);
    return counts_[static_cast<std::size_t>(id)];
}

std::optional<WordId> Vocabulary::find(std::string_view token) const {
    const auto it = index_.find(std::string(token));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

WordId Vocabulary::at(std::string_view token) const {
    if (auto id = find(token)) {
        return *id;
    }
    throw IndexError("unknown word: " + std::string(token));
}

Vocabulary build_vocab(const std::vector<Tokens>& token_lines, std::int64_t min_count,
                       std::optional<std::size_t> max_size) {
    if (min_count < 1) {
        throw Error("min_count must be at least 1");
    }
    if (token_lines.empty()) {
        throw Error("no input lines for vocabulary");
    }
    std::unordered_map<std::string, std::int64_t> freq;
    for (const auto& line : token_lines) {
        for (const auto& token : line) {
            ++freq[token];
        }
    }
    std::vector<std::pair<std::string, std::int64_t>> entries;
    for (auto& [token, count] : freq) {
        if (count >= min_count) {
            entries.emplace_back(token, count);
        }
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;
    });
    if (max_size && entries.size() > *max_size) {
        entries.resize(*max_size);
    }
    if (entries.empty()) {
        throw Error("vocabulary empty after cutoff");
    }
    return Vocabulary(std::move(entries));
}

Vocabulary make_index_vocabulary(std::size_t size) {
    std::vector<std::pair<std::string, std::int64_t>> entries;
    entries.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        entries.emplace_back("w" + std::to_string(i), 1);
    }
    return Vocabulary(std::move(entries));
}

void write_vocab(std::ostream& out, const Vocabulary& vocab) {
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        out << vocab.words()[i] << ' ' << vocab.counts()[i] << '\n';
    }
}

void save_vocab(const std::filesystem::path& path, const Vocabulary& vocab) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    write_vocab(out, vocab);
    out.flush();
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

Vocabulary load_vocab(const std::filesystem::path& path) {
    std::vector<std::pair<std::string, std::int64_t>> entries;
    std::size_t line_no = 0;
    for (const auto& line : read_lines(path)) {
        ++line_no;
        const Tokens fields = tokenize(line, false);
        if (fields.empty()) {
            continue;
        }
        if (fields.size() != 2) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": expected '<token> <count>'");
        }
        std::int64_t count = 0;
        try {
            count = std::stoll(fields[1]);
        } catch (const std::exception&) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": bad count '" + fields[1] + "'");
        }
        entries.emplace_back(fields[0], count);
    }
    if (entries.empty()) {
        throw Error("vocabulary file is empty: " + path.string());
    }
    return Vocabulary(std::move(entries));
}

// ---------------------------------------------------------------------------
// Bags and parallel text

BagOfWords to_bag(const Tokens& tokens, const Vocabulary& vocab) {
    BagOfWords bag;
    bag.indices.reserve(tokens.size());
    for (const auto& token : tokens) {
        if (auto id = vocab.find(token)) {
            bag.indices.push_back(*id);
        }
    }
    return bag;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(std::move(line));
    }
    if (in.bad()) {
        throw IoError("read failed: " + path.string());
    }
    return lines;
}

std::vector<SentencePair> load_parallel(const std::filesystem::path& source_path,
                                        const std::filesystem::path& target_path,
                                        const Vocabulary& vocab_x, const Vocabulary& vocab_y,
                                        bool lowercase) {
    const auto source_lines = read_lines(source_path);
    const auto target_lines = read_lines(target_path);
    if (source_lines.size() != target_lines.size()) {
        throw Error("line count mismatch " + std::to_string(source_lines.size()) + " vs " +
                    std::to_string(target_lines.size()));
    }
    std::vector<SentencePair> pairs;
    pairs.reserve(source_lines.size());
    for (std::size_t i = 0; i < source_lines.size(); ++i) {
        SentencePair pair{to_bag(tokenize(source_lines[i], lowercase), vocab_x),
                          to_bag(tokenize(target_lines[i], lowercase), vocab_y)};
        if (pair.source.empty() && pair.target.empty()) {
            continue;
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// Documents

std::string_view to_string(WeightMode mode) {
    return mode == WeightMode::tfidf ? "tfidf" : "binary";
}

WeightMode parse_weight_mode(std::string_view text) {
    if (text == "tfidf") {
        return WeightMode::tfidf;
    }
    if (text == "binary") {
        return WeightMode::binary;
    }
    throw Error("unknown weight mode: " + std::string(text));
}

std::string_view to_string(Language lang) { return lang == Language::x ? "X" : "Y"; }

Language parse_language(std::string_view text) {
    if (text == "x" || text == "X") {
        return Language::x;
    }
    if (text == "y" || text == "Y") {
        return Language::y;
    }
    throw Error("unknown language: " + std::string(text) + " (expected x or y)");
}

DocumentSet tfidf(const std::vector<RawDocument>& raw_docs, const Vocabulary& vocab, WeightMode mode,
                  Language language) {
    if (raw_docs.empty()) {
        throw Error("no documents");
    }
    std::vector<std::map<WordId, std::int64_t>> term_counts(raw_docs.size());
    std::vector<std::int64_t> doc_freq(vocab.size(), 0);
    for (std::size_t d = 0; d < raw_docs.size(); ++d) {
        for (const WordId id : to_bag(raw_docs[d].tokens, vocab).indices) {
            ++term_counts[d][id];
        }
        for (const auto& [id, count] : term_counts[d]) {
            ++doc_freq[static_cast<std::size_t>(id)];
        }
    }

    const double n_docs = static_cast<double>(raw_docs.size());
    DocumentSet set;
    set.mode = mode;
    set.documents.reserve(raw_docs.size());
    for (std::size_t d = 0; d < raw_docs.size(); ++d) {
        Document doc;
        doc.label = raw_docs[d].label;
        doc.language = language;
        doc.weights.reserve(term_counts[d].size());
        double total = 0.0;
        for (const auto& [id, count] : term_counts[d]) {
            double weight = 1.0;
            if (mode == WeightMode::tfidf) {
                const double df = static_cast<double>(doc_freq[static_cast<std::size_t>(id)]);
                weight = static_cast<double>(count) * std::log(n_docs / df);
            }
            doc.weights.emplace_back(id, weight);
            total += weight;
        }
        if (total > 0.0) {
            if (mode == WeightMode::tfidf) {
                for (auto& entry : doc.weights) {
                    entry.second /= total;
                }
            }
        } else {
            doc.degenerate = true;
        }
        set.documents.push_back(std::move(doc));
    }
    return set;
}

LabelSet::LabelSet(std::vector<std::string> names) : names_(std::move(names)) {
    std::sort(names_.begin(), names_.end());
    names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
}

const std::string& LabelSet::name(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= names_.size()) {
        throw IndexError("label id " + std::to_string(id) + " out of range");
    }
    return names_[static_cast<std::size_t>(id)];
}

int LabelSet::id(std::string_view name) const {
    const auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name) {
        throw IndexError("unknown label: " + std::string(name));
    }
    return static_cast<int>(it - names_.begin());
}

std::vector<LabeledLine> load_labeled_lines(const std::filesystem::path& path, bool lowercase) {
    std::vector<LabeledLine> docs;
    std::size_t line_no = 0;
    for (const auto& line : read_lines(path)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw Error(path.string() + ":" + std::to_string(line_no) +
                        ": expected '<label><TAB><tokens>'");
        }
        docs.push_back({line.substr(0, tab), tokenize(std::string_view(line).substr(tab + 1), lowercase)});
    }
    return docs;
}

std::vector<RawDocument> to_raw_documents(const std::vector<LabeledLine>& lines, const LabelSet& labels) {
    std::vector<RawDocument> docs;
    docs.reserve(lines.size());
    for (const auto& line : lines) {
        docs.push_back({line.tokens, labels.id(line.label)});
    }
    return docs;
}

DocumentSplits split_documents(const std::vector<Document>& documents, double train_fraction,
                               double valid_fraction) {
    if (train_fraction < 0.0 || valid_fraction < 0.0 || train_fraction + valid_fraction > 1.0) {
        throw Error("invalid split fractions");
    }
    const auto n = documents.size();
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    const auto n_valid = std::min(
        n - n_train, static_cast<std::size_t>(std::llround(valid_fraction * static_cast<double>(n))));
    DocumentSplits splits;
    const auto begin = documents.begin();
    splits.train.assign(begin, begin + static_cast<std::ptrdiff_t>(n_train));
    splits.valid.assign(begin + static_cast<std::ptrdiff_t>(n_train),
                        begin + static_cast<std::ptrdiff_t>(n_train + n_valid));
    splits.test.assign(begin + static_cast<std::ptrdiff_t>(n_train + n_valid), documents.end());
    return splits;
}

}  // namespace bowae
