#include "bowae/trainer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "bowae/checkpoint.hpp"
#include "bowae/error.hpp"
#include "bowae/rng.hpp"

namespace bowae {

namespace {

void check_updated(const BilingualModel& model, const PairGradients& grads, std::size_t pair_index) {
    const auto fail = [&](const char* block) {
        throw NumericError("non-finite parameter in " + std::string(block) + " after pair " +
                           std::to_string(pair_index));
    };
    for (const Language lang : {Language::x, Language::y}) {
        const LanguageParams& side = model.side(lang);
        for (const WordId w : grads.embeddings(lang).words) {
            if (!side.embeddings.col(w).allFinite()) {
                fail(lang == Language::x ? "W_x" : "W_y");
            }
        }
        for (const std::int32_t n : grads.decoder(lang).nodes) {
            if (!std::isfinite(side.decoder_bias[n])) {
                fail(lang == Language::x ? "b_x" : "b_y");
            }
            if (!side.decoder_weights.row(n).allFinite()) {
                fail(lang == Language::x ? "U_x" : "U_y");
            }
        }
    }
    if (!model.hidden_bias.allFinite()) {
        fail("c");
    }
}

class EvaluationLog {
public:
    explicit EvaluationLog(const std::optional<std::filesystem::path>& path) {
        if (path) {
            out_.open(*path, std::ios::app);
            if (!out_) {
                throw IoError("cannot open training log: " + path->string());
            }
        }
    }

    void write(const Evaluation& evaluation) {
        if (out_.is_open()) {
            out_ << format_log_line(evaluation) << '\n';
            out_.flush();
        }
    }

private:
    std::ofstream out_;
};

}  // namespace

void validate(const TrainConfig& config) {
    if (config.dim == 0) {
        throw Error("dim must be positive");
    }
    if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
        throw Error("learning_rate must be positive");
    }
    if (config.patience < 1) {
        throw Error("patience must be at least 1");
    }
    if (config.validation_pairs.empty() &&
        !(config.validation_fraction > 0.0 && config.validation_fraction < 1.0)) {
        throw Error("validation_fraction must be in (0, 1)");
    }
    bool any_weight = false;
    for (const double w : config.task_weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error("task weights must be non-negative");
        }
        any_weight = any_weight || w > 0.0;
    }
    if (!any_weight) {
        throw Error("task weights are all zero");
    }
}

std::string_view to_string(StopReason reason) {
    return reason == StopReason::patience ? "patience" : "epochs_max";
}

Evaluation evaluate_pairs(std::span<const SentencePair> pairs, const BilingualModel& model,
                          const TaskWeights& weights) {
    Evaluation evaluation;
    if (pairs.empty()) {
        return evaluation;
    }
    for (const auto& pair : pairs) {
        const PairLoss loss = pair_loss(pair, model, weights);
        evaluation.valid_loss += loss.total;
        for (std::size_t t = 0; t < 4; ++t) {
            evaluation.valid_parts[t] += loss.parts[t];
        }
    }
    const auto n = static_cast<double>(pairs.size());
    evaluation.valid_loss /= n;
    for (double& part : evaluation.valid_parts) {
        part /= n;
    }
    return evaluation;
}

std::string format_log_line(const Evaluation& evaluation) {
    std::ostringstream line;
    line.precision(10);
    line << evaluation.pairs_seen << '\t' << evaluation.train_loss << '\t' << evaluation.valid_loss;
    for (const double part : evaluation.valid_parts) {
        line << '\t' << part;
    }
    return line.str();
}

TrainResult train(std::span<const SentencePair> pairs, const Vocabulary& vocab_x, const Vocabulary& vocab_y,
                  const TrainConfig& config) {
    validate(config);

    std::span<const SentencePair> train_pairs = pairs;
    std::span<const SentencePair> valid_pairs = config.validation_pairs;
    if (config.validation_pairs.empty()) {
        const auto n_valid = static_cast<std::size_t>(
            std::ceil(config.validation_fraction * static_cast<double>(pairs.size())));
        if (n_valid >= pairs.size()) {
            throw Error("need at least one training and one validation pair, got " +
                        std::to_string(pairs.size()) + " pairs");
        }
        train_pairs = pairs.first(pairs.size() - n_valid);
        valid_pairs = pairs.last(n_valid);
    }
    if (train_pairs.empty() || valid_pairs.empty()) {
        throw Error("need at least one training and one validation pair");
    }

    ModelInit init;
    init.dim = config.dim;
    init.nonlinearity = config.nonlinearity;
    init.init_seed = config.init_seed;
    init.tree_seed_x = config.tree_seed_x;
    init.tree_seed_y = config.tree_seed_y;
    init.init_range = config.init_range;

    TrainResult result{BilingualModel::create(vocab_x, vocab_y, init), {}};
    TrainReport& report = result.report;
    report.train_pairs = train_pairs.size();
    report.validation_pairs = valid_pairs.size();
    report.stopped_reason = StopReason::epochs_max;
    if (config.epochs_max == 0) {
        return result;
    }

    if (config.checkpoint_dir) {
        std::filesystem::create_directories(*config.checkpoint_dir);
    }
    EvaluationLog log(config.log_path);

    BilingualModel model = result.model;
    BilingualModel& best = result.model;
    const TaskWeights& weights = config.task_weights;

    Evaluation initial = evaluate_pairs(valid_pairs, model, weights);
    initial.train_loss = std::numeric_limits<double>::quiet_NaN();
    report.evaluations.push_back(initial);
    log.write(initial);
    report.initial_validation_loss = initial.valid_loss;
    report.best_validation_loss = initial.valid_loss;
    report.final_validation_loss = initial.valid_loss;

    const std::size_t eval_every = config.eval_every == 0 ? train_pairs.size() : config.eval_every;
    std::size_t stale = 0;
    std::size_t pairs_seen = 0;
    std::size_t last_evaluated = 0;
    double window_loss = 0.0;
    std::size_t window_count = 0;

    // Logs an evaluation of the current iterate and keeps the best snapshot.
    // Returns true when patience is exhausted.
    const auto evaluate_now = [&] {
        Evaluation evaluation = evaluate_pairs(valid_pairs, model, weights);
        evaluation.pairs_seen = pairs_seen;
        evaluation.train_loss = window_loss / static_cast<double>(window_count);
        window_loss = 0.0;
        window_count = 0;
        last_evaluated = pairs_seen;
        report.evaluations.push_back(evaluation);
        report.final_validation_loss = evaluation.valid_loss;
        log.write(evaluation);

        const double previous_best = report.best_validation_loss;
        if (evaluation.valid_loss < previous_best) {
            report.best_validation_loss = evaluation.valid_loss;
            report.best_pairs_seen = pairs_seen;
            best = model;
            if (config.checkpoint_dir) {
                save_checkpoint(*config.checkpoint_dir / ("ckpt_" + std::to_string(pairs_seen) + ".bin"), best);
            }
        }
        if (evaluation.valid_loss < previous_best * (1.0 - config.min_relative_improvement)) {
            stale = 0;
            return false;
        }
        return ++stale >= config.patience;
    };

    std::vector<std::size_t> order(train_pairs.size());
    bool stop = false;
    for (std::size_t epoch = 0; epoch < config.epochs_max && !stop; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(config.shuffle_seed + epoch);
        rng.shuffle(std::span<std::size_t>(order));

        for (const std::size_t index : order) {
            const PairGradients grads = pair_gradients(train_pairs[index], model, weights);
            if (!std::isfinite(grads.loss.total)) {
                throw NumericError("non-finite loss at pair " + std::to_string(index));
            }
            if (auto block = first_non_finite(grads)) {
                throw NumericError("non-finite gradient in " + *block + " at pair " + std::to_string(index));
            }
            apply_sgd(model, grads, config.learning_rate);
            check_updated(model, grads, index);
            window_loss += grads.loss.total;
            ++window_count;
            ++pairs_seen;

            if (pairs_seen % eval_every == 0 && evaluate_now()) {
                report.stopped_reason = StopReason::patience;
                stop = true;
                break;
            }
        }
    }
    if (pairs_seen != last_evaluated) {
        evaluate_now();
    }
    report.pairs_seen = pairs_seen;
    return result;
}

}  // namespace bowae
