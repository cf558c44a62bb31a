#pragma once

#include <cstdint>
#include <vector>

#include "seqmix/corpus.hpp"

namespace seqmix {

// Pattern-based synthetic NER corpus: entity surface forms are drawn from
// per-type vocabulary blocks and flanked by type-signature context tokens,
// so both token identity and local context predict the tag.
struct SynthConfig {
    std::size_t sentences = 1000;
    std::size_t entity_types = 4;
    std::size_t entity_tokens_per_type = 40;
    std::size_t signature_tokens_per_type = 5;
    std::size_t generic_tokens = 20;
    // false: Zipf-like entity draws (frequent heads, rare tails); true:
    // uniform draws, so held-out splits exercise the tail of the vocabulary
    bool uniform_entities = false;
    std::uint64_t seed = 0;
};

LabelSet synthetic_label_set(std::size_t entity_types = 4);

std::vector<LabeledSequence> make_synthetic_corpus(const SynthConfig& cfg);

}  // namespace seqmix
