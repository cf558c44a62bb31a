#pragma once

#include <cstdint>
#include <vector>

#include "seqmix/corpus.hpp"
#include "seqmix/embedding.hpp"
#include "seqmix/tagger.hpp"

namespace seqmix {

enum class Policy { random, lc, nte, qbc };

struct PolicyKind {
    Policy variant = Policy::random;
    std::size_t committee_size = 3;  // qbc only
};

Policy parse_policy(const std::string& name);
std::string policy_name(Policy p);

// Sum over positions of one minus the top predicted probability.
double score_lc(const std::vector<LabelDist>& dists);

// Mean per-position Shannon entropy (natural log, 0*log 0 = 0).
double score_nte(const std::vector<LabelDist>& dists);

// Vote entropy of the committee's per-position argmax votes
// (ties to lowest label index).
double score_qbc(const std::vector<std::vector<LabelDist>>& committee_dists);

// Top-K pool indices by policy score, ties broken by lower pool index,
// returned in descending score order. The random policy draws a seeded
// uniform sample without replacement.
std::vector<std::size_t> select_batch(const std::vector<LabeledSequence>& pool,
                                      std::size_t k, const PolicyKind& policy,
                                      const std::vector<TaggerModel>& models,
                                      const EmbeddingTable& table,
                                      std::uint64_t seed);

}  // namespace seqmix
