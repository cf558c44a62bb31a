#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqmix/corpus.hpp"
#include "seqmix/discriminator.hpp"
#include "seqmix/embedding.hpp"
#include "seqmix/mixer.hpp"
#include "seqmix/query.hpp"
#include "seqmix/tagger.hpp"

namespace seqmix {

// Labeled / unlabeled / augmented partitions with round bookkeeping.
// Unlabeled sequences carry their gold labels but the loop never reads
// them until annotate() reveals them.
struct PoolState {
    std::vector<LabeledSequence> labeled;
    std::vector<LabeledSequence> unlabeled;
    std::vector<LabeledSequence> augmented;
    std::size_t round = 0;

    std::vector<LabeledSequence> training_set() const;
};

// Simulated oracle: moves the indexed sequences from unlabeled to labeled
// and returns them. Indices must be valid, distinct, and currently
// unlabeled.
std::vector<LabeledSequence> annotate(const std::vector<std::size_t>& batch,
                                      PoolState& pool);

struct DiscriminatorConfig {
    std::size_t order = 3;
    double smoothing_k = 0.1;
    bool calibrate = true;
    double accept_percentile = 0.9;
    ScoreRange fixed_range{0.0, 500.0};  // used when calibrate is false
};

struct ExperimentConfig {
    std::size_t seed_size = 200;
    std::size_t rounds = 5;
    std::vector<std::size_t> per_round_k = {100};  // scalar broadcast or per-round
    PolicyKind policy;
    MixConfig mix;
    TrainConfig train;
    DiscriminatorConfig discriminator;
    std::size_t repeats = 5;
    std::uint64_t master_seed = 0;
    bool parents_all_labeled = false;  // default: the round's batch only

    std::size_t k_for_round(std::size_t round) const {
        if (per_round_k.empty()) return 0;
        return round < per_round_k.size() ? per_round_k[round] : per_round_k.back();
    }
};

struct RoundRecord {
    std::size_t repeat;
    std::size_t round;
    std::size_t data_usage;  // annotated sequences (seed + queried so far)
    std::string policy;
    std::string variant;
    std::size_t n_augmented;  // accepted generations this round
    double precision_dev, recall_dev, f1_dev;
    double precision_test, recall_test, f1_test;
};

using LearningCurve = std::vector<RoundRecord>;

struct F1Result {
    double precision;
    double recall;
    double f1;
};

// Micro-averaged span-level exact-match P/R/F1 of argmax predictions
// against gold; undefined ratios evaluate to 0.
F1Result evaluate_f1(const TaggerModel& model,
                     const std::vector<LabeledSequence>& data,
                     const EmbeddingTable& table);

// One full Algorithm-1 run for a single repeat seed: seed augmentation,
// initial training, then R rounds of query / annotate / SeqMix / train.
// Records metrics after every training step (round 0 is the seed stage).
LearningCurve run_experiment(const ExperimentConfig& cfg,
                             const std::vector<LabeledSequence>& train_corpus,
                             const std::vector<LabeledSequence>& dev_corpus,
                             const std::vector<LabeledSequence>& test_corpus,
                             const EmbeddingTable& table, const LabelSet& labels,
                             std::size_t repeat_index = 0,
                             std::vector<GenerationRecord>* audit = nullptr,
                             PoolState* final_pool = nullptr);

std::string curve_csv_header();
std::string curve_csv_row(const RoundRecord& r);

}  // namespace seqmix
