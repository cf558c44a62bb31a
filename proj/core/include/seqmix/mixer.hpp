#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "seqmix/corpus.hpp"
#include "seqmix/discriminator.hpp"
#include "seqmix/embedding.hpp"
#include "seqmix/rng.hpp"

namespace seqmix {

enum class MixVariant { whole, sub, label_constrained_sub };

MixVariant parse_mix_variant(const std::string& name);
std::string mix_variant_name(MixVariant v);

struct MixConfig {
    double alpha = 8.0;
    MixVariant variant = MixVariant::sub;
    std::size_t window_s = 5;
    std::size_t min_valid_n = 3;  // eta0 = min_valid_n / window_s
    double augment_rate_r = 0.2;
    std::uint64_t seed = 0;

    double eta0() const {
        return static_cast<double>(min_valid_n) / static_cast<double>(window_s);
    }
};

struct PairingDesc {
    MixVariant variant;
    // window start offsets in each parent; unset for whole-sequence pairing
    std::optional<std::pair<std::size_t, std::size_t>> offsets;
};

struct GenerationRecord {
    LabeledSequence child;
    std::pair<std::size_t, std::size_t> parent_ids;
    double lambda;
    std::optional<std::pair<std::size_t, std::size_t>> window_offsets;
    double perplexity;
    bool accepted;
};

// Fraction of window positions whose argmax label is not "O".
double valid_label_density(const std::vector<LabelDist>& window,
                           std::size_t outside_index);

// The pairing function: whole needs equal lengths and both whole-sequence
// densities >= eta0; sub picks the leftmost eligible window in each parent;
// label_constrained_sub additionally requires position-wise identical hard
// labels, searching offset pairs in lexicographic order.
std::optional<PairingDesc> pair_eligible(const LabeledSequence& a,
                                         const LabeledSequence& b,
                                         const MixConfig& cfg,
                                         std::size_t outside_index);

// One lambda ~ Beta(alpha, alpha) per pair; mixed tokens via nearest
// neighbor with both parents excluded at each position, mixed labels by
// convex combination (label_constrained keeps labels verbatim). Up to two
// children (whole yields identical content, deduplicated to one).
std::vector<LabeledSequence> mix_pair(const LabeledSequence& a,
                                      const LabeledSequence& b,
                                      const PairingDesc& desc, const MixConfig& cfg,
                                      const EmbeddingTable& table, Rng& rng);

// Same mixing with the coefficient pinned; the sampled form above delegates
// here after drawing lambda ~ Beta(alpha, alpha).
std::vector<LabeledSequence> mix_pair_with_lambda(const LabeledSequence& a,
                                                  const LabeledSequence& b,
                                                  const PairingDesc& desc,
                                                  const MixConfig& cfg,
                                                  const EmbeddingTable& table,
                                                  double lambda);

// Iterates ordered pairs (i<j) of the batch, filters candidates through the
// discriminator, stops once N children are accepted. Returns every record,
// accepted and rejected, for audit.
std::vector<GenerationRecord> generate(const std::vector<LabeledSequence>& batch,
                                       const MixConfig& cfg,
                                       const EmbeddingTable& table,
                                       const Discriminator& disc, std::size_t n,
                                       std::size_t outside_index, std::uint64_t seed);

}  // namespace seqmix
