#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "seqmix/corpus.hpp"
#include "seqmix/embedding.hpp"

namespace seqmix::testing {

inline LabelSet bio_labels(std::vector<std::string> types) {
    std::vector<std::string> names{"O"};
    for (const auto& t : types) {
        names.push_back("B-" + t);
        names.push_back("I-" + t);
    }
    return LabelSet(std::move(names));
}

// sequence from parallel token / tag name lists
inline LabeledSequence make_seq(const LabelSet& labels,
                                const std::vector<std::string>& tokens,
                                const std::vector<std::string>& tags) {
    LabeledSequence seq;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        seq.tokens.push_back(Token{tokens[t], std::nullopt});
        seq.labels.push_back(LabelDist::one_hot(labels.size(), *labels.index_of(tags[t])));
    }
    return seq;
}

inline EmbeddingTable make_table(const std::vector<std::string>& vocab,
                                 const std::vector<std::vector<double>>& rows) {
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return EmbeddingTable(vocab, flat, rows.front().size());
}

}  // namespace seqmix::testing
