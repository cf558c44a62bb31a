#include "seqmix/mixer.hpp"

#include <algorithm>
#include <iostream>
#include <stdexcept>

namespace seqmix {

MixVariant parse_mix_variant(const std::string& name) {
    if (name == "whole") return MixVariant::whole;
    if (name == "sub") return MixVariant::sub;
    if (name == "label_constrained_sub" || name == "lc-sub") {
        return MixVariant::label_constrained_sub;
    }
    throw std::invalid_argument("unknown mix variant: " + name);
}

std::string mix_variant_name(MixVariant v) {
    switch (v) {
        case MixVariant::whole: return "whole";
        case MixVariant::sub: return "sub";
        case MixVariant::label_constrained_sub: return "label_constrained_sub";
    }
    return "?";
}

double valid_label_density(const std::vector<LabelDist>& window,
                           std::size_t outside_index) {
    std::size_t valid = 0;
    for (const auto& d : window) {
        if (d.argmax() != outside_index) ++valid;
    }
    return static_cast<double>(valid) / static_cast<double>(window.size());
}

namespace {

double window_density(const LabeledSequence& seq, std::size_t off, std::size_t s,
                      std::size_t outside_index) {
    std::size_t valid = 0;
    for (std::size_t t = off; t < off + s; ++t) {
        if (seq.labels[t].argmax() != outside_index) ++valid;
    }
    return static_cast<double>(valid) / static_cast<double>(s);
}

std::vector<std::size_t> eligible_offsets(const LabeledSequence& seq,
                                          const MixConfig& cfg,
                                          std::size_t outside_index) {
    std::vector<std::size_t> offsets;
    if (seq.length() < cfg.window_s) return offsets;
    for (std::size_t off = 0; off + cfg.window_s <= seq.length(); ++off) {
        if (window_density(seq, off, cfg.window_s, outside_index) >= cfg.eta0()) {
            offsets.push_back(off);
        }
    }
    return offsets;
}

bool labels_match(const LabeledSequence& a, std::size_t off_a,
                  const LabeledSequence& b, std::size_t off_b, std::size_t s) {
    for (std::size_t t = 0; t < s; ++t) {
        if (a.labels[off_a + t].argmax() != b.labels[off_b + t].argmax()) return false;
    }
    return true;
}

bool same_content(const LabeledSequence& a, const LabeledSequence& b) {
    if (a.length() != b.length()) return false;
    for (std::size_t t = 0; t < a.length(); ++t) {
        if (a.tokens[t].surface != b.tokens[t].surface) return false;
        if (a.labels[t].argmax() != b.labels[t].argmax()) return false;
    }
    return true;
}

}  // namespace

std::optional<PairingDesc> pair_eligible(const LabeledSequence& a,
                                         const LabeledSequence& b,
                                         const MixConfig& cfg,
                                         std::size_t outside_index) {
    switch (cfg.variant) {
        case MixVariant::whole: {
            if (a.length() != b.length()) return std::nullopt;
            double da = valid_label_density(a.labels, outside_index);
            double db = valid_label_density(b.labels, outside_index);
            if (da < cfg.eta0() || db < cfg.eta0()) return std::nullopt;
            return PairingDesc{MixVariant::whole, std::nullopt};
        }
        case MixVariant::sub: {
            auto offs_a = eligible_offsets(a, cfg, outside_index);
            auto offs_b = eligible_offsets(b, cfg, outside_index);
            if (offs_a.empty() || offs_b.empty()) return std::nullopt;
            return PairingDesc{MixVariant::sub,
                               std::make_pair(offs_a.front(), offs_b.front())};
        }
        case MixVariant::label_constrained_sub: {
            auto offs_a = eligible_offsets(a, cfg, outside_index);
            auto offs_b = eligible_offsets(b, cfg, outside_index);
            for (std::size_t oa : offs_a) {
                for (std::size_t ob : offs_b) {
                    if (labels_match(a, oa, b, ob, cfg.window_s)) {
                        return PairingDesc{MixVariant::label_constrained_sub,
                                           std::make_pair(oa, ob)};
                    }
                }
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::vector<LabeledSequence> mix_pair(const LabeledSequence& a,
                                      const LabeledSequence& b,
                                      const PairingDesc& desc, const MixConfig& cfg,
                                      const EmbeddingTable& table, Rng& rng) {
    return mix_pair_with_lambda(a, b, desc, cfg, table, sample_beta(rng, cfg.alpha));
}

std::vector<LabeledSequence> mix_pair_with_lambda(const LabeledSequence& a,
                                                  const LabeledSequence& b,
                                                  const PairingDesc& desc,
                                                  const MixConfig& cfg,
                                                  const EmbeddingTable& table,
                                                  double lambda) {
    const bool whole = desc.variant == MixVariant::whole;
    const std::size_t s = whole ? a.length() : cfg.window_s;
    const std::size_t off_a = whole ? 0 : desc.offsets->first;
    const std::size_t off_b = whole ? 0 : desc.offsets->second;

    std::vector<Token> mixed_tokens(s);
    std::vector<LabelDist> mixed_a(s);  // labels spliced into child a
    std::vector<LabelDist> mixed_b(s);
    for (std::size_t t = 0; t < s; ++t) {
        const Token& ta = a.tokens[off_a + t];
        const Token& tb = b.tokens[off_b + t];
        std::unordered_set<std::size_t> excluded;
        if (auto id = table.id_of(ta.surface)) excluded.insert(*id);
        if (auto id = table.id_of(tb.surface)) excluded.insert(*id);
        auto [id, surface] =
            mix_and_lookup(table.lookup(ta.surface), table.lookup(tb.surface), lambda,
                           table, excluded);
        mixed_tokens[t] = Token{surface, id};

        if (desc.variant == MixVariant::label_constrained_sub) {
            mixed_a[t] = a.labels[off_a + t];
            mixed_b[t] = b.labels[off_b + t];
        } else {
            const auto& pa = a.labels[off_a + t].probs;
            const auto& pb = b.labels[off_b + t].probs;
            LabelDist mixed;
            mixed.probs.resize(pa.size());
            for (std::size_t c = 0; c < pa.size(); ++c) {
                mixed.probs[c] = lambda * pa[c] + (1.0 - lambda) * pb[c];
            }
            mixed_a[t] = mixed;
            mixed_b[t] = mixed;
        }
    }

    auto splice = [&](const LabeledSequence& parent, std::size_t off,
                      const std::vector<LabelDist>& window_labels) {
        LabeledSequence child = parent;
        child.provenance = Provenance::generated;
        child.lambda = lambda;
        for (std::size_t t = 0; t < s; ++t) {
            child.tokens[off + t] = mixed_tokens[t];
            child.labels[off + t] = window_labels[t];
        }
        return child;
    };

    std::vector<LabeledSequence> children;
    children.push_back(splice(a, off_a, mixed_a));
    if (!whole) {
        children.push_back(splice(b, off_b, mixed_b));
    } else {
        LabeledSequence other = splice(b, off_b, mixed_b);
        if (!same_content(children.front(), other)) children.push_back(other);
    }
    return children;
}

std::vector<GenerationRecord> generate(const std::vector<LabeledSequence>& batch,
                                       const MixConfig& cfg,
                                       const EmbeddingTable& table,
                                       const Discriminator& disc, std::size_t n,
                                       std::size_t outside_index, std::uint64_t seed) {
    std::vector<GenerationRecord> records;
    if (n == 0) return records;
    Rng rng(splitmix64(seed));
    std::size_t accepted = 0;
    std::vector<LabeledSequence> kept;

    auto duplicates_existing = [&](const LabeledSequence& child) {
        for (const auto& member : batch) {
            if (same_content(child, member)) return true;
        }
        for (const auto& prior : kept) {
            if (same_content(child, prior)) return true;
        }
        return false;
    };

    for (std::size_t i = 0; i < batch.size() && accepted < n; ++i) {
        for (std::size_t j = i + 1; j < batch.size() && accepted < n; ++j) {
            auto desc = pair_eligible(batch[i], batch[j], cfg, outside_index);
            if (!desc) continue;
            std::vector<LabeledSequence> children;
            try {
                children = mix_pair(batch[i], batch[j], *desc, cfg, table, rng);
            } catch (const GenerationError& e) {
                std::cerr << "warning: skipping pair (" << i << "," << j
                          << "): " << e.what() << '\n';
                continue;
            }
            for (auto& child : children) {
                if (accepted >= n) break;
                child.parent_ids = std::make_pair(i, j);
                GenerationRecord rec;
                rec.parent_ids = {i, j};
                rec.lambda = *child.lambda;
                rec.window_offsets = desc->offsets;
                rec.perplexity = disc.score(child);
                rec.accepted = disc.accept(rec.perplexity) && !duplicates_existing(child);
                rec.child = std::move(child);
                if (rec.accepted) {
                    ++accepted;
                    kept.push_back(rec.child);
                }
                records.push_back(std::move(rec));
            }
        }
    }
    if (accepted < n) {
        std::cerr << "warning: generation shortfall, accepted " << accepted << " of "
                  << n << " requested\n";
    }
    return records;
}

}  // namespace seqmix
