#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "seqmix/corpus.hpp"

namespace seqmix {

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reserved token strings excluded from generation when present in a table.
inline const std::vector<std::string> kDefaultReservedTokens = {
    "<pad>", "<s>", "</s>", "<unk>"};

// Immutable vocabulary <-> vector table; the {W, E} queried by nearest
// neighbor during mixup.
class EmbeddingTable {
  public:
    EmbeddingTable(std::vector<std::string> vocab, std::vector<double> vectors,
                   std::size_t dim,
                   const std::vector<std::string>& reserved = kDefaultReservedTokens);

    std::size_t vocab_size() const { return vocab_.size(); }
    std::size_t dim() const { return dim_; }
    const std::string& token(std::size_t id) const { return vocab_.at(id); }
    const std::unordered_set<std::size_t>& special_ids() const { return special_ids_; }

    std::span<const double> row(std::size_t id) const {
        return {vectors_.data() + id * dim_, dim_};
    }
    std::optional<std::size_t> id_of(const std::string& token) const;

    // Unknown surfaces resolve to the "<unk>" row when the table has one.
    std::span<const double> lookup(const std::string& token) const;

  private:
    std::vector<std::string> vocab_;
    std::vector<double> vectors_;  // row-major V x d
    std::size_t dim_;
    std::unordered_map<std::string, std::size_t> index_;
    std::unordered_set<std::size_t> special_ids_;
    std::optional<std::size_t> unk_id_;
};

// Text format: optional header "V d", then "token v1 ... vd" per line.
EmbeddingTable load_embeddings(std::istream& in,
                               const std::vector<std::string>& reserved =
                                   kDefaultReservedTokens);

std::string serialize_embeddings(const EmbeddingTable& table);

// argmin over non-excluded, non-special rows of the Euclidean distance to
// lambda*e_i + (1-lambda)*e_j; ties broken by lowest vocab index.
std::pair<std::size_t, std::string> mix_and_lookup(
    std::span<const double> e_i, std::span<const double> e_j, double lambda,
    const EmbeddingTable& table, const std::unordered_set<std::size_t>& excluded);

// Self-contained substitute for an externally trained table: symmetric
// windowed co-occurrence counts, log(1+count), seeded random projection to
// d dimensions. Deterministic for a fixed seed.
EmbeddingTable derive_cooccurrence_embeddings(
    const std::vector<LabeledSequence>& corpus, std::size_t d, std::size_t window,
    std::uint64_t seed,
    const std::vector<std::string>& reserved = kDefaultReservedTokens);

}  // namespace seqmix
