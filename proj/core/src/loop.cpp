#include "seqmix/loop.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "seqmix/rng.hpp"

namespace seqmix {

std::vector<LabeledSequence> PoolState::training_set() const {
    std::vector<LabeledSequence> all = labeled;
    all.insert(all.end(), augmented.begin(), augmented.end());
    return all;
}

std::vector<LabeledSequence> annotate(const std::vector<std::size_t>& batch,
                                      PoolState& pool) {
    std::set<std::size_t> unique(batch.begin(), batch.end());
    if (unique.size() != batch.size()) {
        throw std::logic_error("annotate: duplicate index in batch");
    }
    for (std::size_t idx : batch) {
        if (idx >= pool.unlabeled.size()) {
            throw std::logic_error("annotate: index out of range (already labeled?)");
        }
    }
    std::vector<LabeledSequence> revealed;
    revealed.reserve(batch.size());
    for (std::size_t idx : batch) revealed.push_back(pool.unlabeled[idx]);
    // remove in descending order so earlier indices stay valid
    std::vector<std::size_t> sorted(unique.rbegin(), unique.rend());
    for (std::size_t idx : sorted) {
        pool.unlabeled.erase(pool.unlabeled.begin() + static_cast<long>(idx));
    }
    pool.labeled.insert(pool.labeled.end(), revealed.begin(), revealed.end());
    return revealed;
}

F1Result evaluate_f1(const TaggerModel& model,
                     const std::vector<LabeledSequence>& data,
                     const EmbeddingTable& table) {
    const LabelSet& labels = model.label_set();
    std::size_t matched = 0, predicted = 0, gold = 0;
    for (const auto& seq : data) {
        auto gold_spans = extract_spans(seq, labels);
        LabeledSequence pred = seq;
        pred.labels = predict_dist(model, seq, table);
        // harden the argmax so span extraction applies
        for (auto& d : pred.labels) {
            d = LabelDist::one_hot(labels.size(), d.argmax());
        }
        auto pred_spans = extract_spans(pred, labels);
        gold += gold_spans.size();
        predicted += pred_spans.size();
        for (const auto& s : pred_spans) {
            if (std::find(gold_spans.begin(), gold_spans.end(), s) !=
                gold_spans.end()) {
                ++matched;
            }
        }
    }
    double p = predicted ? static_cast<double>(matched) / predicted : 0.0;
    double r = gold ? static_cast<double>(matched) / gold : 0.0;
    double f1 = (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
    return {p, r, f1};
}

namespace {

std::size_t augment_budget(double rate, std::size_t base) {
    return static_cast<std::size_t>(std::ceil(rate * static_cast<double>(base)));
}

std::vector<TaggerModel> fit_models(const ExperimentConfig& cfg,
                                    const std::vector<LabeledSequence>& training,
                                    const EmbeddingTable& table,
                                    const LabelSet& labels, std::uint64_t seed) {
    TrainConfig tc = cfg.train;
    tc.seed = seed;
    if (cfg.policy.variant == Policy::qbc) {
        return train_committee(training, cfg.policy.committee_size, tc, table, labels);
    }
    TaggerModel init(labels, table.dim(), tc.seed);
    return {train(init, training, tc, table)};
}

}  // namespace

LearningCurve run_experiment(const ExperimentConfig& cfg,
                             const std::vector<LabeledSequence>& train_corpus,
                             const std::vector<LabeledSequence>& dev_corpus,
                             const std::vector<LabeledSequence>& test_corpus,
                             const EmbeddingTable& table, const LabelSet& labels,
                             std::size_t repeat_index,
                             std::vector<GenerationRecord>* audit,
                             PoolState* final_pool) {
    const std::uint64_t run_seed =
        splitmix64(cfg.master_seed + 0x51ab5eedULL * (repeat_index + 1));

    PoolState pool;
    {
        std::vector<std::size_t> order(train_corpus.size());
        std::iota(order.begin(), order.end(), 0);
        Rng rng(substream_seed(run_seed, "split"));
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (i < cfg.seed_size) {
                pool.labeled.push_back(train_corpus[order[i]]);
            } else {
                pool.unlabeled.push_back(train_corpus[order[i]]);
            }
        }
    }

    // discriminator LM over the experiment's own text, labels ignored
    Discriminator disc;
    {
        std::vector<LabeledSequence> text = pool.labeled;
        text.insert(text.end(), pool.unlabeled.begin(), pool.unlabeled.end());
        disc.lm = train_lm(text, cfg.discriminator.order, cfg.discriminator.smoothing_k);
        disc.range = cfg.discriminator.calibrate
                         ? calibrate_range(disc.lm, text,
                                           cfg.discriminator.accept_percentile)
                         : cfg.discriminator.fixed_range;
    }

    MixConfig mix = cfg.mix;
    LearningCurve curve;

    auto record_round = [&](const std::vector<TaggerModel>& models,
                            std::size_t n_aug_round) {
        auto dev = evaluate_f1(models.front(), dev_corpus, table);
        auto test = evaluate_f1(models.front(), test_corpus, table);
        curve.push_back(RoundRecord{
            repeat_index, pool.round, pool.labeled.size(),
            policy_name(cfg.policy.variant), mix_variant_name(mix.variant),
            n_aug_round, dev.precision, dev.recall, dev.f1, test.precision,
            test.recall, test.f1});
    };

    auto run_seqmix = [&](const std::vector<LabeledSequence>& parents,
                          std::size_t budget, std::size_t round) {
        if (cfg.mix.augment_rate_r <= 0.0 || budget == 0) return std::size_t{0};
        mix.seed = substream_seed(run_seed, "mixup") + round;
        auto records = generate(parents, mix, table, disc, budget,
                                labels.outside_index(), mix.seed);
        std::size_t accepted = 0;
        for (auto& rec : records) {
            if (rec.accepted) {
                pool.augmented.push_back(rec.child);
                ++accepted;
            }
        }
        if (audit) {
            audit->insert(audit->end(), std::make_move_iterator(records.begin()),
                          std::make_move_iterator(records.end()));
        }
        return accepted;
    };

    // seed-set augmentation + model initialization (round 0)
    std::size_t n_aug =
        run_seqmix(pool.labeled, augment_budget(cfg.mix.augment_rate_r, pool.labeled.size()), 0);
    auto models = fit_models(cfg, pool.training_set(), table, labels,
                             substream_seed(run_seed, "tagger"));
    record_round(models, n_aug);

    for (std::size_t round = 1; round <= cfg.rounds; ++round) {
        std::size_t k = cfg.k_for_round(round - 1);
        if (k > pool.unlabeled.size()) {
            std::cerr << "warning: pool exhausted at round " << round
                      << ", stopping early\n";
            break;
        }
        pool.round = round;
        auto batch_idx = select_batch(pool.unlabeled, k, cfg.policy, models, table,
                                      substream_seed(run_seed, "policy") + round);
        auto batch = annotate(batch_idx, pool);
        const auto& parents = cfg.parents_all_labeled ? pool.labeled : batch;
        n_aug = run_seqmix(parents, augment_budget(cfg.mix.augment_rate_r, k), round);
        models = fit_models(cfg, pool.training_set(), table, labels,
                            substream_seed(run_seed, "tagger") + round);
        record_round(models, n_aug);
    }
    if (final_pool) *final_pool = pool;
    return curve;
}

std::string curve_csv_header() {
    return "repeat,round,data_usage,policy,variant,n_augmented,precision_dev,"
           "recall_dev,f1_dev,precision_test,recall_test,f1_test";
}

std::string curve_csv_row(const RoundRecord& r) {
    std::ostringstream out;
    out.precision(6);
    out << std::fixed;
    out << r.repeat << ',' << r.round << ',' << r.data_usage << ',' << r.policy << ','
        << r.variant << ',' << r.n_augmented << ',' << r.precision_dev << ','
        << r.recall_dev << ',' << r.f1_dev << ',' << r.precision_test << ','
        << r.recall_test << ',' << r.f1_test;
    return out.str();
}

}  // namespace seqmix
