#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bowae/corpus.hpp"
#include "bowae/model.hpp"

namespace bowae {

struct TrainConfig {
    std::size_t dim = 40;
    double learning_rate = 0.01;
    std::size_t epochs_max = 50;
    /// Evaluations without improvement before stopping.
    std::size_t patience = 5;
    /// Tail fraction of the pair list held out for validation, used when
    /// validation_pairs is empty.
    double validation_fraction = 0.05;
    std::vector<SentencePair> validation_pairs;
    std::uint64_t shuffle_seed = 1;
    std::uint64_t init_seed = 1;
    std::uint64_t tree_seed_x = 2;
    std::uint64_t tree_seed_y = 3;
    TaskWeights task_weights = kEqualTaskWeights;
    /// Training pairs between validation evaluations; 0 means once per epoch.
    std::size_t eval_every = 0;
    Nonlinearity nonlinearity = Nonlinearity::tanh;
    double init_range = 0.05;
    /// Minimum relative decrease of the validation loss that counts as improvement.
    double min_relative_improvement = 1e-6;

    /// If set, the best-so-far model is written here at every improvement
    /// as ckpt_<pairs_seen>.bin.
    std::optional<std::filesystem::path> checkpoint_dir;
    /// If set, one line per evaluation is appended here.
    std::optional<std::filesystem::path> log_path;
};

/// Throws Error describing the first violated constraint.
void validate(const TrainConfig& config);

struct Evaluation {
    std::size_t pairs_seen = 0;
    /// Mean training pair loss since the previous evaluation (NaN at pairs_seen 0).
    double train_loss = 0.0;
    /// Mean pair loss over the validation set.
    double valid_loss = 0.0;
    /// Mean per-task validation losses: x->x, y->y, x->y, y->x.
    std::array<double, 4> valid_parts{};
};

enum class StopReason { patience, epochs_max };

std::string_view to_string(StopReason reason);

struct TrainReport {
    std::vector<Evaluation> evaluations;
    double initial_validation_loss = 0.0;
    double best_validation_loss = 0.0;
    std::size_t best_pairs_seen = 0;
    /// Validation loss of the last iterate, before the best snapshot is restored.
    double final_validation_loss = 0.0;
    std::size_t pairs_seen = 0;
    std::size_t train_pairs = 0;
    std::size_t validation_pairs = 0;
    StopReason stopped_reason = StopReason::epochs_max;
};

struct TrainResult {
    /// Snapshot with the lowest validation loss.
    BilingualModel model;
    TrainReport report;
};

/// Mean pair loss (total and parts) over a set of pairs.
Evaluation evaluate_pairs(std::span<const SentencePair> pairs, const BilingualModel& model,
                          const TaskWeights& weights);

/// Plain SGD, one pair per step, with validation-based early stopping.
///
/// The pair order is reshuffled at the start of every epoch with seed
/// shuffle_seed + epoch. The validation set is evaluated before training,
/// every eval_every pairs, and once more after the last step if that step
/// was not already evaluated.
TrainResult train(std::span<const SentencePair> pairs, const Vocabulary& vocab_x, const Vocabulary& vocab_y,
                  const TrainConfig& config);

/// `pairs_seen<TAB>train_loss<TAB>valid_loss<TAB>l_xx<TAB>l_yy<TAB>l_xy<TAB>l_yx`
std::string format_log_line(const Evaluation& evaluation);

}  // namespace bowae
