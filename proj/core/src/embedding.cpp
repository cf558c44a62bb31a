#include "seqmix/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "seqmix/rng.hpp"

namespace seqmix {

EmbeddingTable::EmbeddingTable(std::vector<std::string> vocab,
                               std::vector<double> vectors, std::size_t dim,
                               const std::vector<std::string>& reserved)
    : vocab_(std::move(vocab)), vectors_(std::move(vectors)), dim_(dim) {
    if (vocab_.empty() || dim_ == 0) {
        throw FormatError("embedding table must have V >= 1 and d >= 1");
    }
    if (vectors_.size() != vocab_.size() * dim_) {
        throw FormatError("embedding matrix size does not match V x d");
    }
    for (double v : vectors_) {
        if (!std::isfinite(v)) throw FormatError("non-finite embedding component");
    }
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
        if (!index_.emplace(vocab_[i], i).second) {
            throw FormatError("duplicate token in embedding table: " + vocab_[i]);
        }
    }
    for (const auto& tok : reserved) {
        auto it = index_.find(tok);
        if (it != index_.end()) special_ids_.insert(it->second);
    }
    auto it = index_.find("<unk>");
    if (it != index_.end()) unk_id_ = it->second;
}

std::optional<std::size_t> EmbeddingTable::id_of(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::span<const double> EmbeddingTable::lookup(const std::string& token) const {
    auto id = id_of(token);
    if (id) return row(*id);
    if (unk_id_) return row(*unk_id_);
    throw GenerationError("token not in table and no <unk> row: " + token);
}

EmbeddingTable load_embeddings(std::istream& in,
                               const std::vector<std::string>& reserved) {
    std::vector<std::string> vocab;
    std::vector<double> vectors;
    std::size_t dim = 0;
    std::string line;
    std::size_t lineno = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream iss(line);
        std::string token;
        if (!(iss >> token)) continue;
        std::vector<double> vals;
        double v;
        while (iss >> v) vals.push_back(v);
        if (first_content) {
            first_content = false;
            // header "V d": two integers, "token" parses as the first
            char* end = nullptr;
            double maybe = std::strtod(token.c_str(), &end);
            if (end && *end == '\0' && vals.size() == 1 && maybe == std::floor(maybe)) {
                continue;  // header line, sizes are implied by the body
            }
        }
        if (vals.empty()) {
            throw FormatError("line " + std::to_string(lineno) +
                              ": no vector components");
        }
        if (dim == 0) {
            dim = vals.size();
        } else if (vals.size() != dim) {
            throw FormatError("line " + std::to_string(lineno) +
                              ": dimension mismatch (expected " + std::to_string(dim) +
                              ", got " + std::to_string(vals.size()) + ")");
        }
        vocab.push_back(token);
        vectors.insert(vectors.end(), vals.begin(), vals.end());
    }
    return EmbeddingTable(std::move(vocab), std::move(vectors), dim, reserved);
}

std::string serialize_embeddings(const EmbeddingTable& table) {
    std::ostringstream out;
    out.precision(17);
    out << table.vocab_size() << ' ' << table.dim() << '\n';
    for (std::size_t i = 0; i < table.vocab_size(); ++i) {
        out << table.token(i);
        for (double v : table.row(i)) out << ' ' << v;
        out << '\n';
    }
    return out.str();
}

std::pair<std::size_t, std::string> mix_and_lookup(
    std::span<const double> e_i, std::span<const double> e_j, double lambda,
    const EmbeddingTable& table, const std::unordered_set<std::size_t>& excluded) {
    const std::size_t d = table.dim();
    std::vector<double> mixed(d);
    for (std::size_t k = 0; k < d; ++k) {
        mixed[k] = lambda * e_i[k] + (1.0 - lambda) * e_j[k];
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_id = table.vocab_size();
    for (std::size_t v = 0; v < table.vocab_size(); ++v) {
        if (excluded.contains(v) || table.special_ids().contains(v)) continue;
        auto r = table.row(v);
        double dist = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double diff = r[k] - mixed[k];
            dist += diff * diff;
        }
        if (dist < best) {
            best = dist;
            best_id = v;
        }
    }
    if (best_id == table.vocab_size()) {
        throw GenerationError("all embedding rows excluded from lookup");
    }
    return {best_id, table.token(best_id)};
}

EmbeddingTable derive_cooccurrence_embeddings(
    const std::vector<LabeledSequence>& corpus, std::size_t d, std::size_t window,
    std::uint64_t seed, const std::vector<std::string>& reserved) {
    // vocabulary: reserved tokens first, then corpus tokens in first-seen order
    std::vector<std::string> vocab(reserved.begin(), reserved.end());
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < vocab.size(); ++i) index[vocab[i]] = i;
    for (const auto& seq : corpus) {
        for (const auto& tok : seq.tokens) {
            if (index.emplace(tok.surface, vocab.size()).second) {
                vocab.push_back(tok.surface);
            }
        }
    }
    const std::size_t V = vocab.size();

    // direction-aware contexts: "b to the right of a" and "b to the left of
    // a" are distinct features, so tokens that fill different positions of a
    // recurring pattern get distinct embeddings
    std::map<std::pair<std::size_t, std::size_t>, double> counts;
    for (const auto& seq : corpus) {
        for (std::size_t t = 0; t < seq.tokens.size(); ++t) {
            std::size_t a = index[seq.tokens[t].surface];
            std::size_t hi = std::min(seq.tokens.size(), t + window + 1);
            for (std::size_t u = t + 1; u < hi; ++u) {
                std::size_t b = index[seq.tokens[u].surface];
                counts[{a, b}] += 1.0;
                counts[{b, V + a}] += 1.0;
            }
        }
    }

    // seeded random projection of the log co-occurrence rows to d dimensions
    Rng rng(splitmix64(seed));
    std::vector<double> proj(2 * V * d);
    for (double& p : proj) p = 2.0 * uniform01(rng) - 1.0;

    std::vector<double> vectors(V * d, 0.0);
    for (const auto& [key, c] : counts) {
        auto [a, b] = key;
        double w = std::log1p(c);
        for (std::size_t k = 0; k < d; ++k) {
            vectors[a * d + k] += w * proj[b * d + k];
        }
    }
    // fixed-norm rows: nearest neighbor then compares direction, not raw
    // frequency; the norm keeps classifier features at a trainable scale
    const double row_norm = 8.0;
    for (std::size_t v = 0; v < V; ++v) {
        double norm = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            norm += vectors[v * d + k] * vectors[v * d + k];
        }
        if (norm > 0.0) {
            norm = std::sqrt(norm) / row_norm;
            for (std::size_t k = 0; k < d; ++k) vectors[v * d + k] /= norm;
        }
    }
    // reserved rows stay at small distinct offsets so lookups are defined
    for (std::size_t r = 0; r < reserved.size(); ++r) {
        for (std::size_t k = 0; k < d; ++k) {
            vectors[r * d + k] = (k == r % d) ? 1e-3 * static_cast<double>(r + 1) : 0.0;
        }
    }
    return EmbeddingTable(std::move(vocab), std::move(vectors), d, reserved);
}

}  // namespace seqmix
