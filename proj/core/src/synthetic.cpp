#include "seqmix/synthetic.hpp"

#include <algorithm>
#include <string>

#include "seqmix/rng.hpp"

namespace seqmix {

namespace {

const char* kTypeNames[] = {"PER", "LOC", "ORG", "MISC", "EVT", "GPE", "FAC", "VEH"};

std::string type_name(std::size_t t) {
    if (t < std::size(kTypeNames)) return kTypeNames[t];
    return "T" + std::to_string(t);
}

}  // namespace

LabelSet synthetic_label_set(std::size_t entity_types) {
    std::vector<std::string> names{"O"};
    for (std::size_t t = 0; t < entity_types; ++t) {
        names.push_back("B-" + type_name(t));
        names.push_back("I-" + type_name(t));
    }
    return LabelSet(std::move(names));
}

std::vector<LabeledSequence> make_synthetic_corpus(const SynthConfig& cfg) {
    LabelSet labels = synthetic_label_set(cfg.entity_types);
    const std::size_t m = labels.size();
    Rng rng(splitmix64(cfg.seed ^ 0x5e9f00d5ULL));

    auto ent = [&](std::size_t type, std::size_t k) {
        return "ent" + type_name(type) + "_" + std::to_string(k);
    };
    auto sig = [&](std::size_t type, std::size_t k) {
        return "sig" + type_name(type) + "_" + std::to_string(k);
    };
    auto ctx = [&](std::size_t k) { return "ctx_" + std::to_string(k); };

    // skewed (Zipf-like) draws: low indices are frequent, high ones rare, so
    // the corpus has both common and once-seen n-gram patterns
    auto skewed = [&](std::size_t n) {
        double u = uniform01(rng);
        return std::min(n - 1, static_cast<std::size_t>(u * u * static_cast<double>(n)));
    };
    std::uniform_int_distribution<std::size_t> type_dist(0, cfg.entity_types - 1);
    auto pick_type = [&](Rng& r) { return type_dist(r); };
    auto pick_sig = [&](Rng&) { return skewed(cfg.signature_tokens_per_type); };
    auto pick_ctx = [&](Rng&) { return skewed(cfg.generic_tokens); };

    std::vector<LabeledSequence> corpus;
    corpus.reserve(cfg.sentences);
    for (std::size_t s = 0; s < cfg.sentences; ++s) {
        LabeledSequence seq;
        auto push = [&](const std::string& surface, std::size_t label) {
            seq.tokens.push_back(Token{surface, std::nullopt});
            seq.labels.push_back(LabelDist::one_hot(m, label));
        };
        // an entity mention is head+middle+tail drawn independently from
        // three per-type slot vocabularies, so recombinations of common slot
        // tokens are themselves attested n-grams
        const std::size_t slot = cfg.entity_tokens_per_type / 3;
        auto pick_slot = [&] {
            return cfg.uniform_entities ? rng() % slot : skewed(slot);
        };
        auto push_entity_group = [&] {
            std::size_t type = pick_type(rng);
            std::size_t b_label = 1 + 2 * type;
            std::size_t i_label = b_label + 1;
            push(sig(type, pick_sig(rng)), labels.outside_index());
            push(ent(type, pick_slot()), b_label);
            push(ent(type, slot + pick_slot()), i_label);
            push(ent(type, 2 * slot + pick_slot()), i_label);
            push(sig(type, pick_sig(rng)), labels.outside_index());
        };
        push(ctx(pick_ctx(rng)), labels.outside_index());
        push_entity_group();
        push(ctx(pick_ctx(rng)), labels.outside_index());
        if (uniform01(rng) < 0.5) {
            push_entity_group();
            push(ctx(pick_ctx(rng)), labels.outside_index());
        }
        corpus.push_back(std::move(seq));
    }
    return corpus;
}

}  // namespace seqmix
