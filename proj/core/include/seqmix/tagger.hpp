#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "seqmix/corpus.hpp"
#include "seqmix/embedding.hpp"

namespace seqmix {

struct TrainConfig {
    std::size_t epochs = 10;
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    bool warm_start = false;
};

// Windowed linear softmax token classifier: features are the concatenated
// embeddings at offsets {-1, 0, +1} (zero padding at boundaries) plus bias.
class TaggerModel {
  public:
    TaggerModel(LabelSet label_set, std::size_t embed_dim, std::uint64_t seed = 0);

    std::size_t num_labels() const { return label_set_.size(); }
    std::size_t embed_dim() const { return embed_dim_; }
    std::size_t feature_dim() const { return 3 * embed_dim_ + 1; }
    const LabelSet& label_set() const { return label_set_; }
    std::uint64_t rng_seed() const { return seed_; }

    // row-major feature_dim x M
    std::vector<double>& weights() { return weights_; }
    const std::vector<double>& weights() const { return weights_; }

    void save(std::ostream& out) const;
    static TaggerModel load(std::istream& in);

  private:
    LabelSet label_set_;
    std::size_t embed_dim_;
    std::uint64_t seed_;
    std::vector<double> weights_;
};

std::vector<LabelDist> predict_dist(const TaggerModel& model,
                                    const LabeledSequence& seq,
                                    const EmbeddingTable& table);

// Mean token cross-entropy H(target, predicted) over all positions.
double cross_entropy_loss(const TaggerModel& model,
                          const std::vector<LabeledSequence>& data,
                          const EmbeddingTable& table);

// Gradient of cross_entropy_loss w.r.t. the weight matrix, same layout.
std::vector<double> loss_gradient(const TaggerModel& model,
                                  const std::vector<LabeledSequence>& data,
                                  const EmbeddingTable& table);

// Seeded mini-batch SGD from fresh zero initialization (no warm start unless
// cfg.warm_start). Deterministic for a fixed (seed, data order).
TaggerModel train(const TaggerModel& model, const std::vector<LabeledSequence>& data,
                  const TrainConfig& cfg, const EmbeddingTable& table);

// C models on bootstrap resamples with seeds cfg.seed+1 .. cfg.seed+C.
std::vector<TaggerModel> train_committee(const std::vector<LabeledSequence>& data,
                                         std::size_t committee_size,
                                         const TrainConfig& cfg,
                                         const EmbeddingTable& table,
                                         const LabelSet& label_set);

}  // namespace seqmix
