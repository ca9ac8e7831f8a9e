#include <doctest.h>

#include <cstring>

#include "bowae/checkpoint.hpp"
#include "bowae/error.hpp"
#include "bowae/synth.hpp"
#include "bowae/trainer.hpp"
#include "model_fixtures.hpp"
#include "test_util.hpp"

using namespace bowae;

namespace {

struct SmallCorpus {
    Vocabulary vx;
    Vocabulary vy;
    std::vector<SentencePair> pairs;
};

SmallCorpus small_corpus(std::size_t sentences = 200) {
    SynthConfig cfg;
    cfg.vocab_size = 20;
    cfg.sentences = sentences;
    cfg.documents = 1;
    const SynthCorpus synth = generate_synthetic(cfg);
    SmallCorpus c;
    c.vx = build_vocab(synth.sentences_x, 1);
    c.vy = build_vocab(synth.sentences_y, 1);
    for (std::size_t i = 0; i < synth.sentences_x.size(); ++i) {
        c.pairs.push_back({to_bag(synth.sentences_x[i], c.vx), to_bag(synth.sentences_y[i], c.vy)});
    }
    return c;
}

bool same_parameters(BilingualModel a, BilingualModel b) {
    auto pa = parameter_blocks(a);
    auto pb = parameter_blocks(b);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        if (std::memcmp(pa[i].values.data(), pb[i].values.data(), pa[i].values.size() * sizeof(double)) != 0) {
            return false;
        }
    }
    return true;
}

TrainConfig small_config() {
    TrainConfig cfg;
    cfg.dim = 4;
    cfg.epochs_max = 4;
    cfg.validation_fraction = 0.1;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    TrainConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(validate(cfg), Error);
    cfg = {};
    cfg.patience = 0;
    CHECK_THROWS_AS(validate(cfg), Error);
    cfg = {};
    cfg.task_weights = {0, 0, 0, 0};
    CHECK_THROWS_WITH_AS(validate(cfg), "task weights are all zero", Error);
    cfg = {};
    cfg.task_weights = {1, -1, 0, 0};
    CHECK_THROWS_AS(validate(cfg), Error);
}

TEST_CASE("epochs_max = 0 returns the initialization") {
    const auto c = small_corpus();
    TrainConfig cfg = small_config();
    cfg.epochs_max = 0;
    const TrainResult r = train(c.pairs, c.vx, c.vy, cfg);
    CHECK(r.report.evaluations.empty());
    CHECK(r.report.pairs_seen == 0);

    ModelInit init;
    init.dim = cfg.dim;
    init.init_seed = cfg.init_seed;
    init.tree_seed_x = cfg.tree_seed_x;
    init.tree_seed_y = cfg.tree_seed_y;
    CHECK(same_parameters(r.model, BilingualModel::create(c.vx, c.vy, init)));
}

TEST_CASE("too few pairs for a split") {
    const auto c = small_corpus(1);
    CHECK_THROWS_AS(train(c.pairs, c.vx, c.vy, small_config()), Error);
}

TEST_CASE("SGD on one repeated pair decreases its own loss") {
    auto m = fixtures::zero_decoder_model(6, 5, 3, 4);
    const SentencePair pair{{{0, 2, 2, 5}}, {{1, 3}}};
    double previous = pair_loss(pair, m).total;
    const double initial = previous;
    int non_increasing = 0;
    for (int step = 0; step < 200; ++step) {
        apply_sgd(m, pair_gradients(pair, m), 0.1);
        const double loss = pair_loss(pair, m).total;
        if (loss <= previous + 1e-8) {
            ++non_increasing;
        }
        previous = loss;
    }
    CHECK(non_increasing >= 190);
    CHECK(previous < initial);

    // Through the trainer with the pair as both training and validation data.
    TrainConfig cfg;
    cfg.dim = 3;
    cfg.learning_rate = 0.1;
    cfg.epochs_max = 200;
    cfg.patience = 200;
    cfg.validation_pairs = {pair};
    const TrainResult r = train(std::vector<SentencePair>{pair}, Vocabulary(make_index_vocabulary(6)),
                                make_index_vocabulary(5), cfg);
    CHECK(r.report.pairs_seen == 200);
    CHECK(r.report.best_validation_loss < 0.5 * r.report.initial_validation_loss);
}

TEST_CASE("training is deterministic") {
    const auto c = small_corpus();
    const TrainResult a = train(c.pairs, c.vx, c.vy, small_config());
    const TrainResult b = train(c.pairs, c.vx, c.vy, small_config());
    CHECK(same_parameters(a.model, b.model));
    CHECK(a.report.best_validation_loss == b.report.best_validation_loss);

    TrainConfig other = small_config();
    other.shuffle_seed = 99;
    CHECK_FALSE(same_parameters(a.model, train(c.pairs, c.vx, c.vy, other).model));
}

TEST_CASE("report bookkeeping and early stopping") {
    const auto c = small_corpus(400);
    TrainConfig cfg = small_config();
    cfg.epochs_max = 30;
    cfg.eval_every = 50;
    cfg.patience = 3;
    cfg.learning_rate = 0.05;
    const TrainResult r = train(c.pairs, c.vx, c.vy, cfg);
    const auto& rep = r.report;
    REQUIRE(rep.evaluations.size() >= 2);
    CHECK(rep.evaluations.front().pairs_seen == 0);
    CHECK(std::isnan(rep.evaluations.front().train_loss));
    CHECK(rep.validation_pairs == 40);
    CHECK(rep.train_pairs == 360);

    double min_logged = rep.evaluations.front().valid_loss;
    for (const auto& e : rep.evaluations) {
        min_logged = std::min(min_logged, e.valid_loss);
        CHECK(e.valid_loss == doctest::Approx(e.valid_parts[0] + e.valid_parts[1] + e.valid_parts[2] +
                                              e.valid_parts[3]));
    }
    CHECK(rep.best_validation_loss == min_logged);
    CHECK(rep.final_validation_loss == rep.evaluations.back().valid_loss);
    CHECK(rep.best_validation_loss <= rep.final_validation_loss);
    CHECK(rep.best_validation_loss < rep.initial_validation_loss);

    // The returned snapshot is the one that scored best.
    const std::span<const SentencePair> valid(c.pairs.data() + 360, 40);
    CHECK(evaluate_pairs(valid, r.model, kEqualTaskWeights).valid_loss == rep.best_validation_loss);

    if (rep.stopped_reason == StopReason::patience) {
        CHECK(rep.pairs_seen < cfg.epochs_max * rep.train_pairs);
    }
}

TEST_CASE("patience stops a run that cannot improve") {
    const auto c = small_corpus();
    TrainConfig cfg = small_config();
    cfg.epochs_max = 100;
    cfg.patience = 2;
    cfg.eval_every = 10;
    cfg.learning_rate = 1e-12;
    cfg.min_relative_improvement = 0.5;
    const TrainResult r = train(c.pairs, c.vx, c.vy, cfg);
    CHECK(r.report.stopped_reason == StopReason::patience);
    CHECK(r.report.pairs_seen == 20);
}

TEST_CASE("checkpoints and log are written") {
    testutil::TempDir dir;
    const auto c = small_corpus();
    TrainConfig cfg = small_config();
    cfg.checkpoint_dir = dir / "ckpt";
    cfg.log_path = dir / "train.log";
    const TrainResult r = train(c.pairs, c.vx, c.vy, cfg);

    const auto lines = read_lines(dir / "train.log");
    CHECK(lines.size() == r.report.evaluations.size());
    for (const auto& line : lines) {
        CHECK(std::count(line.begin(), line.end(), '\t') == 6);
    }
    CHECK(lines.front().rfind("0\tnan\t", 0) == 0);

    const auto best = dir / "ckpt" / ("ckpt_" + std::to_string(r.report.best_pairs_seen) + ".bin");
    REQUIRE(std::filesystem::exists(best));
    CHECK(same_parameters(load_checkpoint(best), r.model));
}

TEST_CASE("divergence aborts with the block name") {
    const auto c = small_corpus();
    TrainConfig cfg = small_config();
    cfg.learning_rate = 1e308;
    CHECK_THROWS_WITH_AS(train(c.pairs, c.vx, c.vy, cfg), doctest::Contains("non-finite"), NumericError);
}

TEST_CASE("monolingual task weights keep W_x independent of the y bags") {
    const auto c = small_corpus();
    auto garbage = c.pairs;
    Rng rng(77);
    for (auto& pair : garbage) {
        for (auto& id : pair.target.indices) {
            id = static_cast<WordId>(rng.below(c.vy.size()));
        }
    }
    const TaskWeights mono{1, 1, 0, 0};
    ModelInit init;
    init.dim = 4;
    auto m = BilingualModel::create(c.vx, c.vy, init);
    // The shared hidden bias couples trajectories through the yy task, so the
    // comparison is made step by step on the same parameter state.
    for (std::size_t i = 0; i < c.pairs.size(); ++i) {
        const auto a = pair_gradients(c.pairs[i], m, mono);
        const auto b = pair_gradients(garbage[i], m, mono);
        REQUIRE(a.embeddings_x.words == b.embeddings_x.words);
        REQUIRE(a.embeddings_x.columns == b.embeddings_x.columns);
        REQUIRE(a.decoder_x.nodes == b.decoder_x.nodes);
        REQUIRE(a.decoder_x.weights == b.decoder_x.weights);
        apply_sgd(m, a, 0.05);
    }
}
