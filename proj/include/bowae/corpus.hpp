#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bowae {

using WordId = std::int32_t;
using Tokens = std::vector<std::string>;

/// Splits a pre-tokenized line on whitespace. ASCII letters are lowercased
/// when requested; other bytes (including UTF-8 sequences) pass through.
Tokens tokenize(std::string_view line, bool lowercase = true);

/// Word <-> index map for one language, ordered by descending frequency
/// then lexicographically.
class Vocabulary {
public:
    Vocabulary() = default;

    /// Builds from explicit (token, count) entries kept in the given order.
    /// Throws on duplicate tokens.
    explicit Vocabulary(std::vector<std::pair<std::string, std::int64_t>> entries);

    std::size_t size() const { return words_.size(); }
    bool empty() const { return words_.empty(); }

    const std::string& word(WordId id) const;
    std::int64_t count(WordId id) const;
    std::optional<WordId> find(std::string_view token) const;
    /// Like find() but throws IndexError naming the token.
    WordId at(std::string_view token) const;

    const std::vector<std::string>& words() const { return words_; }
    const std::vector<std::int64_t>& counts() const { return counts_; }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.words_ == b.words_ && a.counts_ == b.counts_;
    }

private:
    std::vector<std::string> words_;
    std::vector<std::int64_t> counts_;
    std::unordered_map<std::string, WordId> index_;
};

/// Counts tokens, keeps those seen at least min_count times and, if
/// max_size is set, only the max_size most frequent of them.
Vocabulary build_vocab(const std::vector<Tokens>& token_lines, std::int64_t min_count,
                       std::optional<std::size_t> max_size = std::nullopt);

/// Vocabulary with tokens "w0".."w{V-1}" and unit counts.
Vocabulary make_index_vocabulary(std::size_t size);

/// `<token> <count>` per line, in index order.
void write_vocab(std::ostream& out, const Vocabulary& vocab);
void save_vocab(const std::filesystem::path& path, const Vocabulary& vocab);
Vocabulary load_vocab(const std::filesystem::path& path);

/// Order-free multiset of word indices. Duplicates are kept.
struct BagOfWords {
    std::vector<WordId> indices;

    std::size_t size() const { return indices.size(); }
    bool empty() const { return indices.empty(); }
};

/// Maps tokens to indices; out-of-vocabulary tokens are dropped.
BagOfWords to_bag(const Tokens& tokens, const Vocabulary& vocab);

struct SentencePair {
    BagOfWords source;  // language X
    BagOfWords target;  // language Y
};

/// Reads every line of a text file. Throws IoError naming the path.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Pairs line k of source_path with line k of target_path. Pairs that are
/// empty on both sides after OOV filtering are dropped.
std::vector<SentencePair> load_parallel(const std::filesystem::path& source_path,
                                        const std::filesystem::path& target_path,
                                        const Vocabulary& vocab_x, const Vocabulary& vocab_y,
                                        bool lowercase = true);

// ---------------------------------------------------------------------------
// Labeled documents

enum class WeightMode { tfidf, binary };

std::string_view to_string(WeightMode mode);
WeightMode parse_weight_mode(std::string_view text);

enum class Language { x, y };

std::string_view to_string(Language lang);
Language parse_language(std::string_view text);

struct RawDocument {
    Tokens tokens;
    int label = 0;
};

/// Sparse non-negative weights over one vocabulary, sorted by index.
struct Document {
    std::vector<std::pair<WordId, double>> weights;
    int label = 0;
    Language language = Language::x;
    /// All weights are zero (or there are none).
    bool degenerate = false;
};

struct DocumentSet {
    WeightMode mode = WeightMode::tfidf;
    std::vector<Document> documents;
};

/// TF-IDF: weight(w, d) = count(w, d) * ln(N / df(w)), then each document is
/// scaled to sum to one. Binary: weight 1 for every word present.
/// Document frequencies are taken over raw_docs itself.
DocumentSet tfidf(const std::vector<RawDocument>& raw_docs, const Vocabulary& vocab,
                  WeightMode mode, Language language = Language::x);

/// Label names <-> dense ids. Ids follow lexicographic order of the names.
class LabelSet {
public:
    LabelSet() = default;
    explicit LabelSet(std::vector<std::string> names);

    std::size_t size() const { return names_.size(); }
    const std::string& name(int id) const;
    int id(std::string_view name) const;
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
};

/// One labeled document as read from `<label>\t<token token ...>`.
struct LabeledLine {
    std::string label;
    Tokens tokens;
};

std::vector<LabeledLine> load_labeled_lines(const std::filesystem::path& path,
                                            bool lowercase = true);

/// Attaches dense label ids from `labels` to the parsed lines.
std::vector<RawDocument> to_raw_documents(const std::vector<LabeledLine>& lines,
                                          const LabelSet& labels);

/// Contiguous split in file order: the first train_fraction of the
/// documents, then valid_fraction, then the rest.
struct DocumentSplits {
    std::vector<Document> train;
    std::vector<Document> valid;
    std::vector<Document> test;
};

DocumentSplits split_documents(const std::vector<Document>& documents, double train_fraction,
                               double valid_fraction);

}  // namespace bowae
