#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqmix {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Token {
    std::string surface;
    std::optional<std::size_t> vocab_id;
};

// Ordered BIO label inventory. Every non-"O" name must be "B-X" or "I-X".
class LabelSet {
  public:
    LabelSet(std::vector<std::string> names);

    std::size_t size() const { return names_.size(); }
    std::size_t outside_index() const { return outside_index_; }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    const std::vector<std::string>& names() const { return names_; }
    std::optional<std::size_t> index_of(const std::string& name) const;

  private:
    std::vector<std::string> names_;
    std::size_t outside_index_ = 0;
};

// Per-token label distribution over M labels. Hard labels are exact one-hots.
struct LabelDist {
    std::vector<double> probs;

    static LabelDist one_hot(std::size_t m, std::size_t index);
    bool is_hard() const;
    std::size_t argmax() const;  // ties to lowest index
    bool is_simplex(double tol = 1e-9) const;
};

enum class Provenance { original, generated };

struct LabeledSequence {
    std::vector<Token> tokens;
    std::vector<LabelDist> labels;
    Provenance provenance = Provenance::original;
    std::optional<std::pair<std::size_t, std::size_t>> parent_ids;
    std::optional<double> lambda;

    std::size_t length() const { return tokens.size(); }
};

struct Span {
    std::size_t start;
    std::size_t end;  // exclusive
    std::string entity_type;

    bool operator==(const Span&) const = default;
};

inline constexpr std::size_t kDefaultMaxSeqLen = 128;

// Scans a whitespace-column stream for the set of tags seen in the last
// column, returning a LabelSet ("O" is added if absent).
LabelSet collect_labels(std::istream& in);

// CoNLL-style reader: first column is the token, last column the tag,
// blank line ends a sentence, "-DOCSTART-" lines are skipped.
// Sentences longer than max_len are truncated with a warning on stderr.
std::vector<LabeledSequence> parse_conll(std::istream& in, const LabelSet& labels,
                                         std::size_t max_len = kDefaultMaxSeqLen);

// "token tag" per line, blank line after each sentence. Soft labels are
// rejected: they have no single tag.
std::string serialize_conll(const std::vector<LabeledSequence>& seqs,
                            const LabelSet& labels);

// Maximal B-X (I-X)* runs. A stray I-X opens a new span (lenient repair);
// "O" closes any open span.
std::vector<Span> extract_spans(const LabeledSequence& seq, const LabelSet& labels);

}  // namespace seqmix
