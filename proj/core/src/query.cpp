#include "seqmix/query.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "seqmix/rng.hpp"

namespace seqmix {

Policy parse_policy(const std::string& name) {
    if (name == "random") return Policy::random;
    if (name == "lc") return Policy::lc;
    if (name == "nte") return Policy::nte;
    if (name == "qbc") return Policy::qbc;
    throw std::invalid_argument("unknown policy: " + name);
}

std::string policy_name(Policy p) {
    switch (p) {
        case Policy::random: return "random";
        case Policy::lc: return "lc";
        case Policy::nte: return "nte";
        case Policy::qbc: return "qbc";
    }
    return "?";
}

double score_lc(const std::vector<LabelDist>& dists) {
    double s = 0.0;
    for (const auto& d : dists) {
        s += 1.0 - *std::max_element(d.probs.begin(), d.probs.end());
    }
    return s;
}

double score_nte(const std::vector<LabelDist>& dists) {
    double s = 0.0;
    std::vector<double> terms;
    for (const auto& d : dists) {
        // summing in sorted order makes the score invariant under label
        // permutations bit-for-bit, not just mathematically
        terms.clear();
        for (double p : d.probs) {
            if (p > 0.0) terms.push_back(-p * std::log(p));
        }
        std::sort(terms.begin(), terms.end());
        for (double t : terms) s += t;
    }
    return s / static_cast<double>(dists.size());
}

double score_qbc(const std::vector<std::vector<LabelDist>>& committee_dists) {
    const std::size_t c = committee_dists.size();
    const std::size_t t_len = committee_dists.front().size();
    const std::size_t m = committee_dists.front().front().probs.size();
    double s = 0.0;
    std::vector<std::size_t> votes(m);
    for (std::size_t t = 0; t < t_len; ++t) {
        std::fill(votes.begin(), votes.end(), 0);
        for (const auto& member : committee_dists) ++votes[member[t].argmax()];
        for (std::size_t label = 0; label < m; ++label) {
            if (votes[label] == 0) continue;
            double frac = static_cast<double>(votes[label]) / static_cast<double>(c);
            s -= frac * std::log(frac);
        }
    }
    return s / static_cast<double>(t_len);
}

std::vector<std::size_t> select_batch(const std::vector<LabeledSequence>& pool,
                                      std::size_t k, const PolicyKind& policy,
                                      const std::vector<TaggerModel>& models,
                                      const EmbeddingTable& table,
                                      std::uint64_t seed) {
    if (k > pool.size()) {
        throw std::invalid_argument("requested batch larger than pool");
    }
    if (policy.variant == Policy::random) {
        std::vector<std::size_t> indices(pool.size());
        std::iota(indices.begin(), indices.end(), 0);
        Rng rng(splitmix64(seed));
        std::shuffle(indices.begin(), indices.end(), rng);
        indices.resize(k);
        return indices;
    }

    std::vector<double> scores(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        switch (policy.variant) {
            case Policy::lc:
                scores[i] = score_lc(predict_dist(models.front(), pool[i], table));
                break;
            case Policy::nte:
                scores[i] = score_nte(predict_dist(models.front(), pool[i], table));
                break;
            case Policy::qbc: {
                std::vector<std::vector<LabelDist>> committee_dists;
                committee_dists.reserve(models.size());
                for (const auto& model : models) {
                    committee_dists.push_back(predict_dist(model, pool[i], table));
                }
                scores[i] = score_qbc(committee_dists);
                break;
            }
            default: break;
        }
    }
    std::vector<std::size_t> indices(pool.size());
    std::iota(indices.begin(), indices.end(), 0);
    std::stable_sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    indices.resize(k);
    return indices;
}

}  // namespace seqmix
