#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bowae/corpus.hpp"

namespace bowae {

/// Two artificial languages where Y is a seeded bijective renaming of X's
/// words. Each topic draws words from a Zipf distribution over its own
/// random ranking of the vocabulary.
struct SynthConfig {
    std::size_t vocab_size = 60;
    std::size_t topics = 4;
    std::size_t sentences = 2000;
    std::size_t sentence_min_len = 5;
    std::size_t sentence_max_len = 15;
    /// Labeled documents per language.
    std::size_t documents = 800;
    std::size_t document_min_len = 20;
    std::size_t document_max_len = 60;
    double zipf_exponent = 2.0;
    std::uint64_t seed = 7;
};

struct SynthCorpus {
    std::vector<std::string> words_x;
    std::vector<std::string> words_y;
    /// translation[i] is the Y index of X word i.
    std::vector<std::size_t> translation;
    /// Parallel sentences, one token list per line.
    std::vector<Tokens> sentences_x;
    std::vector<Tokens> sentences_y;
    /// Labeled documents per language, drawn independently (not translations).
    std::vector<LabeledLine> documents_x;
    std::vector<LabeledLine> documents_y;
};

SynthCorpus generate_synthetic(const SynthConfig& config);

struct SynthFiles {
    std::filesystem::path parallel_x;
    std::filesystem::path parallel_y;
    std::filesystem::path documents_x;
    std::filesystem::path documents_y;
    /// `<x token><TAB><y token>` per line.
    std::filesystem::path translations;
};

SynthFiles synth_file_names(const std::filesystem::path& dir);

/// Writes the corpus under `dir` (created if absent).
SynthFiles write_synthetic(const SynthCorpus& corpus, const std::filesystem::path& dir);

}  // namespace bowae
