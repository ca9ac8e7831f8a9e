#include "bowae/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "bowae/checkpoint.hpp"
#include "bowae/classifier.hpp"
#include "bowae/corpus.hpp"
#include "bowae/error.hpp"
#include "bowae/pipeline.hpp"
#include "bowae/rng.hpp"
#include "bowae/synth.hpp"
#include "bowae/trainer.hpp"

namespace bowae {

namespace fs = std::filesystem;

namespace {

std::vector<double> parse_doubles(const std::string& text, const char* what) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string field;
    while (std::getline(stream, field, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(field, &used));
            if (used != field.size()) {
                throw std::invalid_argument(field);
            }
        } catch (const std::exception&) {
            throw Error(std::string("bad number in ") + what + ": '" + field + "'");
        }
    }
    return values;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

// Reads `key=value` lines; blank lines and lines starting with '#' are skipped.
std::vector<std::pair<std::string, std::string>> read_config_file(const fs::path& path) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::size_t line_no = 0;
    for (const auto& raw : read_lines(path)) {
        ++line_no;
        const auto first = raw.find_first_not_of(" \t");
        if (first == std::string::npos || raw[first] == '#') {
            continue;
        }
        const auto eq = raw.find('=');
        if (eq == std::string::npos) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
        }
        const auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        entries.emplace_back(trim(raw.substr(0, eq)), trim(raw.substr(eq + 1)));
    }
    return entries;
}

// Config-file values are spliced in right after the subcommand name so
// that later command-line flags take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        std::size_t consumed = 0;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            consumed = 2;
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            consumed = 1;
        } else {
            continue;
        }
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                   args.begin() + static_cast<std::ptrdiff_t>(i + consumed));
        std::vector<std::string> injected;
        for (const auto& [key, value] : read_config_file(path)) {
            injected.push_back("--" + key + "=" + value);
        }
        const auto at = args.empty() ? args.begin() : args.begin() + 1;
        args.insert(at, injected.begin(), injected.end());
        break;
    }
    return args;
}

void write_effective_config(const CLI::App& command, const fs::path& path) {
    std::ofstream out = open_output(path);
    for (const CLI::Option* opt : command.get_options()) {
        const auto& names = opt->get_lnames();
        if (names.empty() || names.front() == "help" || names.front() == "config") {
            continue;
        }
        std::string value = opt->get_default_str();
        if (opt->count() > 0) {
            value = opt->results().back();
        }
        out << names.front() << '=' << value << '\n';
    }
    finish(out, path);
}

// ---------------------------------------------------------------------------

struct VocabArgs {
    std::string input;
    std::int64_t min_count = 1;
    std::size_t max_size = 0;
    std::string out;
    bool no_lowercase = false;
};

void run_vocab(const VocabArgs& a, std::ostream& out) {
    std::vector<Tokens> lines;
    for (const auto& line : read_lines(a.input)) {
        lines.push_back(tokenize(line, !a.no_lowercase));
    }
    const Vocabulary vocab =
        build_vocab(lines, a.min_count, a.max_size > 0 ? std::optional<std::size_t>(a.max_size) : std::nullopt);
    save_vocab(a.out, vocab);
    out << "wrote " << vocab.size() << " words to " << a.out << '\n';
}

struct SynthArgs {
    SynthConfig config;
    std::string out_dir;
};

void run_synth(const SynthArgs& a, std::ostream& out) {
    const SynthFiles files = write_synthetic(generate_synthetic(a.config), a.out_dir);
    out << "wrote " << files.parallel_x.string() << ", " << files.parallel_y.string() << ", "
        << files.documents_x.string() << ", " << files.documents_y.string() << ", "
        << files.translations.string() << '\n';
}

struct TrainArgs {
    std::string source;
    std::string target;
    std::string vocab_x;
    std::string vocab_y;
    std::string valid_source;
    std::string valid_target;
    std::int64_t min_count = 1;
    std::size_t max_vocab = 0;
    std::string out_dir;
    std::size_t dim = 40;
    double learning_rate = 0.01;
    std::size_t epochs = 50;
    std::size_t patience = 5;
    double valid_fraction = 0.05;
    std::size_t eval_every = 0;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> init_seed;
    std::optional<std::uint64_t> shuffle_seed;
    std::optional<std::uint64_t> tree_seed_x;
    std::optional<std::uint64_t> tree_seed_y;
    std::string task_weights = "1,1,1,1";
    std::string nonlinearity = "tanh";
    double init_range = 0.05;
    bool no_lowercase = false;
};

Vocabulary vocab_from_corpus(const std::string& path, const TrainArgs& a) {
    std::vector<Tokens> lines;
    for (const auto& line : read_lines(path)) {
        lines.push_back(tokenize(line, !a.no_lowercase));
    }
    return build_vocab(lines, a.min_count,
                       a.max_vocab > 0 ? std::optional<std::size_t>(a.max_vocab) : std::nullopt);
}

void run_train(const TrainArgs& a, const CLI::App& command, std::ostream& out) {
    const bool lowercase = !a.no_lowercase;
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    write_effective_config(command, dir / "effective_config.txt");

    const Vocabulary vocab_x = a.vocab_x.empty() ? vocab_from_corpus(a.source, a) : load_vocab(a.vocab_x);
    const Vocabulary vocab_y = a.vocab_y.empty() ? vocab_from_corpus(a.target, a) : load_vocab(a.vocab_y);
    save_vocab(dir / "vocab.x.txt", vocab_x);
    save_vocab(dir / "vocab.y.txt", vocab_y);

    const auto pairs = load_parallel(a.source, a.target, vocab_x, vocab_y, lowercase);
    out << "loaded " << pairs.size() << " sentence pairs (V_x=" << vocab_x.size() << ", V_y=" << vocab_y.size()
        << ")\n";

    TrainConfig config;
    config.dim = a.dim;
    config.learning_rate = a.learning_rate;
    config.epochs_max = a.epochs;
    config.patience = a.patience;
    config.validation_fraction = a.valid_fraction;
    if (a.valid_source.empty() != a.valid_target.empty()) {
        throw Error("--valid-source and --valid-target must be given together");
    }
    if (!a.valid_source.empty()) {
        config.validation_pairs = load_parallel(a.valid_source, a.valid_target, vocab_x, vocab_y, lowercase);
    }
    config.eval_every = a.eval_every;
    config.init_seed = a.init_seed.value_or(derive_seed(a.seed, 10));
    config.shuffle_seed = a.shuffle_seed.value_or(derive_seed(a.seed, 11));
    config.tree_seed_x = a.tree_seed_x.value_or(derive_seed(a.seed, 12));
    config.tree_seed_y = a.tree_seed_y.value_or(derive_seed(a.seed, 13));
    const auto weights = parse_doubles(a.task_weights, "--task-weights");
    if (weights.size() != 4) {
        throw Error("--task-weights needs 4 values (xx,yy,xy,yx)");
    }
    std::copy(weights.begin(), weights.end(), config.task_weights.begin());
    config.nonlinearity = parse_nonlinearity(a.nonlinearity);
    config.init_range = a.init_range;
    config.checkpoint_dir = dir / "checkpoints";
    config.log_path = dir / "train.log";

    const TrainResult result = train(pairs, vocab_x, vocab_y, config);
    save_checkpoint(dir / "model.bin", result.model);

    const TrainReport& r = result.report;
    std::ofstream report = open_output(dir / "report.txt");
    report.precision(10);
    report << "train_pairs=" << r.train_pairs << '\n'
           << "validation_pairs=" << r.validation_pairs << '\n'
           << "pairs_seen=" << r.pairs_seen << '\n'
           << "evaluations=" << r.evaluations.size() << '\n'
           << "initial_validation_loss=" << r.initial_validation_loss << '\n'
           << "best_validation_loss=" << r.best_validation_loss << '\n'
           << "best_pairs_seen=" << r.best_pairs_seen << '\n'
           << "final_validation_loss=" << r.final_validation_loss << '\n'
           << "stopped_reason=" << to_string(r.stopped_reason) << '\n';
    finish(report, dir / "report.txt");

    out << "pairs seen: " << r.pairs_seen << ", stopped: " << to_string(r.stopped_reason) << '\n'
        << "validation loss: initial " << r.initial_validation_loss << ", best " << r.best_validation_loss
        << " (at " << r.best_pairs_seen << " pairs)\n"
        << "wrote " << (dir / "model.bin").string() << '\n';
}

struct ClassifyArgs {
    std::string model;
    std::string docs_x;
    std::string docs_y;
    std::string direction = "x2y";
    std::string mode = "auto";
    std::string c_grid = "0.01,0.1,1,10";
    std::size_t svm_epochs = 50;
    std::uint64_t seed = 1;
    double train_fraction = 0.70;
    double valid_fraction = 0.15;
    std::string out;
    std::string kv_out;
    bool no_lowercase = false;
};

void run_classify(const ClassifyArgs& a, std::ostream& out) {
    const BilingualModel model = load_checkpoint(a.model);
    CrossLingualOptions options;
    if (a.direction == "x2y") {
        options.train_language = Language::x;
    } else if (a.direction == "y2x") {
        options.train_language = Language::y;
    } else {
        throw Error("--direction must be x2y or y2x");
    }
    if (a.mode != "auto") {
        options.mode = parse_weight_mode(a.mode);
    }
    options.svm.c_grid = parse_doubles(a.c_grid, "--c-grid");
    options.svm.epochs = a.svm_epochs;
    options.svm.seed = a.seed;
    options.train_fraction = a.train_fraction;
    options.valid_fraction = a.valid_fraction;

    const auto docs_x = load_labeled_lines(a.docs_x, !a.no_lowercase);
    const auto docs_y = load_labeled_lines(a.docs_y, !a.no_lowercase);
    const CrossLingualResult result = run_cross_lingual(model, docs_x, docs_y, options);

    std::ostringstream block;
    block << "direction: " << a.direction << " (train " << to_string(options.train_language) << " on "
          << result.train_documents << " documents, select on " << result.valid_documents << ", test "
          << result.test_documents << ")\n"
          << "mode: " << to_string(result.svm.mode) << ", C: " << result.svm.c
          << ", validation error: " << result.svm.validation_error << '\n';
    write_report(block, result.test, result.labels);
    out << block.str();
    if (!a.out.empty()) {
        std::ofstream file = open_output(a.out);
        file << block.str();
        finish(file, a.out);
    }
    if (!a.kv_out.empty()) {
        std::ofstream file = open_output(a.kv_out);
        file << "direction=" << a.direction << '\n'
             << "mode=" << to_string(result.svm.mode) << '\n'
             << "c=" << result.svm.c << '\n'
             << "validation_error=" << result.svm.validation_error << '\n';
        write_report_kv(file, result.test, result.labels);
        finish(file, a.kv_out);
    }
}

struct NnArgs {
    std::string model;
    std::vector<std::string> words;
    std::size_t top_words = 10;
    std::string from = "x";
    std::string to = "y";
    std::size_t k = 5;
    std::string out;
};

void run_nn(const NnArgs& a, std::ostream& out) {
    const BilingualModel model = load_checkpoint(a.model);
    const Language from = parse_language(a.from);
    const Language to = parse_language(a.to);
    std::vector<std::string> words = a.words;
    if (words.empty()) {
        const auto& vocab = model.side(from).vocab;
        for (std::size_t i = 0; i < std::min(a.top_words, vocab.size()); ++i) {
            words.push_back(vocab.words()[i]);
        }
    }
    std::ostringstream table;
    table.precision(6);
    table << "word\trank\tneighbor\tcosine\n";
    for (const auto& word : words) {
        const auto neighbors = nearest_neighbors(word, from, to, a.k, model);
        for (std::size_t r = 0; r < neighbors.size(); ++r) {
            table << word << '\t' << r + 1 << '\t' << neighbors[r].token << '\t' << neighbors[r].similarity << '\n';
        }
    }
    out << table.str();
    if (!a.out.empty()) {
        std::ofstream file = open_output(a.out);
        file << table.str();
        finish(file, a.out);
    }
}

struct ExportArgs {
    std::string model;
    std::string lang = "x";
    std::string out;
};

void run_export(const ExportArgs& a, std::ostream& out) {
    const BilingualModel model = load_checkpoint(a.model);
    const LanguageParams& side = model.side(parse_language(a.lang));
    std::ofstream file = open_output(a.out);
    write_embeddings(file, side.vocab, side.embeddings);
    finish(file, a.out);
    out << "wrote " << side.vocab_size() << " embeddings to " << a.out << '\n';
}

struct ProjectArgs {
    std::string model;
    std::size_t top_n = 300;
    std::string out;
};

void run_project(const ProjectArgs& a, std::ostream& out) {
    const BilingualModel model = load_checkpoint(a.model);
    const auto points = project_2d(model, a.top_n);
    std::ofstream file = open_output(a.out);
    write_projection(file, points);
    finish(file, a.out);
    out << "wrote " << points.size() << " projected words to " << a.out << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bilingual word embeddings from sentence-aligned text with a tree-decoder bag-of-words autoencoder"};
    app.name("bowae");
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    VocabArgs vocab;
    auto* vocab_cmd = app.add_subcommand("vocab", "Build a vocabulary from a tokenized text file");
    vocab_cmd->add_option("--input", vocab.input, "Tokenized text, one sentence per line")->required();
    vocab_cmd->add_option("--min-count", vocab.min_count, "Drop tokens seen fewer times");
    vocab_cmd->add_option("--max-size", vocab.max_size, "Keep only the most frequent tokens (0 = no limit)");
    vocab_cmd->add_option("--out", vocab.out, "Output file, '<token> <count>' per line")->required();
    vocab_cmd->add_flag("--no-lowercase", vocab.no_lowercase, "Keep token case");

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic bilingual corpus with labeled documents");
    synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
    synth_cmd->add_option("--vocab-size", synth.config.vocab_size, "Words per language");
    synth_cmd->add_option("--topics", synth.config.topics, "Number of topics (document classes)");
    synth_cmd->add_option("--sentences", synth.config.sentences, "Parallel sentence pairs");
    synth_cmd->add_option("--documents", synth.config.documents, "Labeled documents per language");
    synth_cmd->add_option("--min-len", synth.config.sentence_min_len, "Shortest sentence");
    synth_cmd->add_option("--max-len", synth.config.sentence_max_len, "Longest sentence");
    synth_cmd->add_option("--doc-min-len", synth.config.document_min_len, "Shortest document");
    synth_cmd->add_option("--doc-max-len", synth.config.document_max_len, "Longest document");
    synth_cmd->add_option("--zipf", synth.config.zipf_exponent, "Zipf exponent of the topic distributions");
    synth_cmd->add_option("--seed", synth.config.seed, "Seed for the renaming, topics and samples");

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train bilingual embeddings on sentence-aligned text");
    train_cmd->add_option("--source", tr.source, "Language X sentences, one per line")->required();
    train_cmd->add_option("--target", tr.target, "Language Y sentences, line-aligned with --source")->required();
    train_cmd->add_option("--vocab-x", tr.vocab_x, "Vocabulary file for X (default: built from --source)");
    train_cmd->add_option("--vocab-y", tr.vocab_y, "Vocabulary file for Y (default: built from --target)");
    train_cmd->add_option("--min-count", tr.min_count, "Minimum count when building vocabularies");
    train_cmd->add_option("--max-vocab", tr.max_vocab, "Maximum vocabulary size when building (0 = no limit)");
    train_cmd->add_option("--valid-source", tr.valid_source, "Explicit validation X sentences");
    train_cmd->add_option("--valid-target", tr.valid_target, "Explicit validation Y sentences");
    train_cmd->add_option("--out-dir", tr.out_dir, "Output directory")->required();
    train_cmd->add_option("--dim", tr.dim, "Embedding dimension D");
    train_cmd->add_option("--lr", tr.learning_rate, "SGD learning rate");
    train_cmd->add_option("--epochs", tr.epochs, "Maximum number of epochs");
    train_cmd->add_option("--patience", tr.patience, "Evaluations without improvement before stopping");
    train_cmd->add_option("--valid-fraction", tr.valid_fraction, "Tail fraction of pairs held out for validation");
    train_cmd->add_option("--eval-every", tr.eval_every, "Pairs between validation evaluations (0 = once per epoch)");
    train_cmd->add_option("--seed", tr.seed, "Global seed for initialization, shuffling and trees");
    train_cmd->add_option("--init-seed", tr.init_seed, "Override the embedding initialization seed");
    train_cmd->add_option("--shuffle-seed", tr.shuffle_seed, "Override the pair shuffling seed");
    train_cmd->add_option("--tree-seed-x", tr.tree_seed_x, "Override the X tree seed");
    train_cmd->add_option("--tree-seed-y", tr.tree_seed_y, "Override the Y tree seed");
    train_cmd->add_option("--task-weights", tr.task_weights, "Weights of the x->x,y->y,x->y,y->x losses");
    train_cmd->add_option("--nonlinearity", tr.nonlinearity, "Hidden nonlinearity: tanh or identity");
    train_cmd->add_option("--init-range", tr.init_range, "Embeddings start uniform in [-r, r]");
    train_cmd->add_flag("--no-lowercase", tr.no_lowercase, "Keep token case");

    ClassifyArgs cl;
    auto* classify_cmd = app.add_subcommand("classify", "Cross-lingual document classification with a trained model");
    classify_cmd->add_option("--model", cl.model, "Model checkpoint")->required();
    classify_cmd->add_option("--docs-x", cl.docs_x, "Language X documents, '<label><TAB><tokens>' per line")->required();
    classify_cmd->add_option("--docs-y", cl.docs_y, "Language Y documents, same format")->required();
    classify_cmd->add_option("--direction", cl.direction, "x2y: train on X, test on Y; y2x: the reverse");
    classify_cmd->add_option("--mode", cl.mode, "Document weighting: auto, tfidf or binary");
    classify_cmd->add_option("--c-grid", cl.c_grid, "Comma-separated SVM C values");
    classify_cmd->add_option("--svm-epochs", cl.svm_epochs, "SVM sub-gradient epochs");
    classify_cmd->add_option("--seed", cl.seed, "SVM shuffling seed");
    classify_cmd->add_option("--train-fraction", cl.train_fraction, "Leading fraction of each document list used for training");
    classify_cmd->add_option("--valid-fraction", cl.valid_fraction, "Following fraction used for model selection");
    classify_cmd->add_option("--out", cl.out, "Write the report here too");
    classify_cmd->add_option("--kv-out", cl.kv_out, "Write a key=value report here");
    classify_cmd->add_flag("--no-lowercase", cl.no_lowercase, "Keep token case");

    NnArgs nn;
    auto* nn_cmd = app.add_subcommand("nn", "Nearest neighbors across the embedding spaces");
    nn_cmd->add_option("--model", nn.model, "Model checkpoint")->required();
    nn_cmd->add_option("--word", nn.words, "Query word (repeatable)")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    nn_cmd->add_option("--top-words", nn.top_words, "Without --word, query the most frequent source words");
    nn_cmd->add_option("--from", nn.from, "Query language: x or y");
    nn_cmd->add_option("--to", nn.to, "Neighbor language: x or y");
    nn_cmd->add_option("-k", nn.k, "Neighbors per word");
    nn_cmd->add_option("--out", nn.out, "Write the table here too");

    ExportArgs ex;
    auto* export_cmd = app.add_subcommand("export", "Export one language's embeddings as text");
    export_cmd->add_option("--model", ex.model, "Model checkpoint")->required();
    export_cmd->add_option("--lang", ex.lang, "Language: x or y");
    export_cmd->add_option("--out", ex.out, "Output file")->required();

    ProjectArgs pr;
    auto* project_cmd = app.add_subcommand("project", "2-D PCA projection of the most frequent words of both languages");
    project_cmd->add_option("--model", pr.model, "Model checkpoint")->required();
    project_cmd->add_option("--top-n", pr.top_n, "Words per language");
    project_cmd->add_option("--out", pr.out, "Output file, 'token<TAB>lang<TAB>x<TAB>y' per line")->required();

    for (CLI::App* command : app.get_subcommands({})) {
        command->add_option("--config", "File of key=value defaults; command-line flags take precedence");
    }

    try {
        std::vector<std::string> args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*vocab_cmd) {
            run_vocab(vocab, out);
        } else if (*synth_cmd) {
            run_synth(synth, out);
        } else if (*train_cmd) {
            run_train(tr, *train_cmd, out);
        } else if (*classify_cmd) {
            run_classify(cl, out);
        } else if (*nn_cmd) {
            run_nn(nn, out);
        } else if (*export_cmd) {
            run_export(ex, out);
        } else if (*project_cmd) {
            run_project(pr, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace bowae
