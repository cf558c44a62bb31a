#include "seqmix/tagger.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include "seqmix/rng.hpp"

namespace seqmix {

namespace {

// features for position t: [e(t-1), e(t), e(t+1), 1]
void fill_features(const LabeledSequence& seq, std::size_t t,
                   const EmbeddingTable& table, std::vector<double>& feat) {
    const std::size_t d = table.dim();
    std::fill(feat.begin(), feat.end(), 0.0);
    for (int off = -1; off <= 1; ++off) {
        long p = static_cast<long>(t) + off;
        if (p < 0 || p >= static_cast<long>(seq.tokens.size())) continue;
        auto e = table.lookup(seq.tokens[static_cast<std::size_t>(p)].surface);
        std::copy(e.begin(), e.end(),
                  feat.begin() + static_cast<std::size_t>(off + 1) * d);
    }
    feat.back() = 1.0;
}

void softmax_scores(const std::vector<double>& weights, const std::vector<double>& feat,
                    std::size_t m, std::vector<double>& out) {
    const std::size_t f = feat.size();
    out.assign(m, 0.0);
    for (std::size_t k = 0; k < f; ++k) {
        if (feat[k] == 0.0) continue;
        const double* wrow = weights.data() + k * m;
        for (std::size_t c = 0; c < m; ++c) out[c] += feat[k] * wrow[c];
    }
    double zmax = *std::max_element(out.begin(), out.end());
    double sum = 0.0;
    for (double& z : out) {
        z = std::exp(z - zmax);
        sum += z;
    }
    for (double& z : out) z /= sum;
}

}  // namespace

TaggerModel::TaggerModel(LabelSet label_set, std::size_t embed_dim, std::uint64_t seed)
    : label_set_(std::move(label_set)), embed_dim_(embed_dim), seed_(seed),
      weights_(feature_dim() * label_set_.size(), 0.0) {}

void TaggerModel::save(std::ostream& out) const {
    out << "seqmix-tagger v1\n";
    out << embed_dim_ << ' ' << label_set_.size() << ' ' << seed_ << '\n';
    for (const auto& name : label_set_.names()) out << name << ' ';
    out << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        out << weights_[i] << (i + 1 == weights_.size() ? '\n' : ' ');
    }
}

TaggerModel TaggerModel::load(std::istream& in) {
    std::string magic, version;
    in >> magic >> version;
    if (magic != "seqmix-tagger" || version != "v1") {
        throw FormatError("unrecognized tagger checkpoint header");
    }
    std::size_t d, m;
    std::uint64_t seed;
    in >> d >> m >> seed;
    std::vector<std::string> names(m);
    for (auto& n : names) in >> n;
    TaggerModel model(LabelSet(std::move(names)), d, seed);
    for (double& w : model.weights_) {
        if (!(in >> w)) throw FormatError("truncated tagger checkpoint");
    }
    return model;
}

std::vector<LabelDist> predict_dist(const TaggerModel& model,
                                    const LabeledSequence& seq,
                                    const EmbeddingTable& table) {
    const std::size_t m = model.num_labels();
    std::vector<LabelDist> out(seq.length());
    std::vector<double> feat(model.feature_dim());
    for (std::size_t t = 0; t < seq.length(); ++t) {
        fill_features(seq, t, table, feat);
        softmax_scores(model.weights(), feat, m, out[t].probs);
    }
    return out;
}

double cross_entropy_loss(const TaggerModel& model,
                          const std::vector<LabeledSequence>& data,
                          const EmbeddingTable& table) {
    const std::size_t m = model.num_labels();
    std::vector<double> feat(model.feature_dim());
    std::vector<double> probs;
    double loss = 0.0;
    std::size_t count = 0;
    for (const auto& seq : data) {
        for (std::size_t t = 0; t < seq.length(); ++t) {
            fill_features(seq, t, table, feat);
            softmax_scores(model.weights(), feat, m, probs);
            for (std::size_t c = 0; c < m; ++c) {
                double target = seq.labels[t].probs[c];
                if (target > 0.0) loss -= target * std::log(probs[c]);
            }
            ++count;
        }
    }
    return count ? loss / static_cast<double>(count) : 0.0;
}

std::vector<double> loss_gradient(const TaggerModel& model,
                                  const std::vector<LabeledSequence>& data,
                                  const EmbeddingTable& table) {
    const std::size_t m = model.num_labels();
    const std::size_t f = model.feature_dim();
    std::vector<double> grad(f * m, 0.0);
    std::vector<double> feat(f);
    std::vector<double> probs;
    std::size_t count = 0;
    for (const auto& seq : data) {
        for (std::size_t t = 0; t < seq.length(); ++t) {
            fill_features(seq, t, table, feat);
            softmax_scores(model.weights(), feat, m, probs);
            for (std::size_t k = 0; k < f; ++k) {
                if (feat[k] == 0.0) continue;
                double* grow = grad.data() + k * m;
                for (std::size_t c = 0; c < m; ++c) {
                    grow[c] += feat[k] * (probs[c] - seq.labels[t].probs[c]);
                }
            }
            ++count;
        }
    }
    if (count) {
        for (double& g : grad) g /= static_cast<double>(count);
    }
    return grad;
}

TaggerModel train(const TaggerModel& model, const std::vector<LabeledSequence>& data,
                  const TrainConfig& cfg, const EmbeddingTable& table) {
    TaggerModel out = cfg.warm_start
                          ? model
                          : TaggerModel(model.label_set(), model.embed_dim(), cfg.seed);
    const std::size_t m = out.num_labels();
    const std::size_t f = out.feature_dim();
    Rng rng(splitmix64(cfg.seed));
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    std::vector<double> feat(f);
    std::vector<double> probs;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            std::vector<double> grad(f * m, 0.0);
            std::size_t count = 0;
            for (std::size_t b = start; b < stop; ++b) {
                const auto& seq = data[order[b]];
                for (std::size_t t = 0; t < seq.length(); ++t) {
                    fill_features(seq, t, table, feat);
                    softmax_scores(out.weights(), feat, m, probs);
                    for (std::size_t k = 0; k < f; ++k) {
                        if (feat[k] == 0.0) continue;
                        double* grow = grad.data() + k * m;
                        for (std::size_t c = 0; c < m; ++c) {
                            grow[c] += feat[k] * (probs[c] - seq.labels[t].probs[c]);
                        }
                    }
                    ++count;
                }
            }
            if (!count) continue;
            double scale = cfg.learning_rate / static_cast<double>(count);
            for (std::size_t i = 0; i < grad.size(); ++i) {
                out.weights()[i] -= scale * grad[i];
            }
        }
    }
    return out;
}

std::vector<TaggerModel> train_committee(const std::vector<LabeledSequence>& data,
                                         std::size_t committee_size,
                                         const TrainConfig& cfg,
                                         const EmbeddingTable& table,
                                         const LabelSet& label_set) {
    std::vector<TaggerModel> committee;
    committee.reserve(committee_size);
    for (std::size_t c = 1; c <= committee_size; ++c) {
        TrainConfig member_cfg = cfg;
        member_cfg.seed = cfg.seed + c;
        Rng rng(splitmix64(substream_seed(member_cfg.seed, "bootstrap")));
        std::vector<LabeledSequence> sample;
        sample.reserve(data.size());
        std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
        for (std::size_t i = 0; i < data.size(); ++i) sample.push_back(data[pick(rng)]);
        TaggerModel init(label_set, table.dim(), member_cfg.seed);
        committee.push_back(train(init, sample, member_cfg, table));
    }
    return committee;
}

}  // namespace seqmix
