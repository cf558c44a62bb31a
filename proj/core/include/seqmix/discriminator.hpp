#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "seqmix/corpus.hpp"

namespace seqmix {

// Add-k smoothed n-gram language model; the artifact's perplexity scorer.
class NgramLM {
  public:
    NgramLM(std::size_t order = 3, double smoothing_k = 0.1, std::size_t vocab_size = 0)
        : order_(order), smoothing_k_(smoothing_k), vocab_size_(vocab_size) {}

    std::size_t order() const { return order_; }
    double smoothing_k() const { return smoothing_k_; }
    std::size_t vocab_size() const { return vocab_size_; }
    void set_vocab_size(std::size_t v) { vocab_size_ = v; }

    void observe(const std::vector<std::string>& context, const std::string& token);
    // p(token | context), add-k: (count + k) / (context_count + k V)
    double probability(const std::vector<std::string>& context,
                       const std::string& token) const;
    std::size_t ngram_count(const std::vector<std::string>& context,
                            const std::string& token) const;
    std::size_t context_count(const std::vector<std::string>& context) const;

    void save(std::ostream& out) const;
    static NgramLM load(std::istream& in);

  private:
    std::size_t order_;
    double smoothing_k_;
    std::size_t vocab_size_;
    std::map<std::string, std::map<std::string, std::size_t>> counts_;
};

struct ScoreRange {
    double s1 = 0.0;
    double s2 = 500.0;
};

inline const std::string kSentenceStart = "<s>";
inline const std::string kSentenceEnd = "</s>";

// Counts top-order n-grams with sentence-boundary padding; labels ignored.
NgramLM train_lm(const std::vector<LabeledSequence>& corpus, std::size_t order = 3,
                 double smoothing_k = 0.1);

// 2^(-(1/T) sum log2 p(w_i | context)); boundary symbols appear in the
// contexts but are not scored and do not count toward T.
double perplexity(const NgramLM& lm, const LabeledSequence& seq);

// s1 <= perp <= s2, inclusive at both ends.
bool judge(double perp, const ScoreRange& range);

// (0, p-th nearest-rank percentile of corpus perplexities).
ScoreRange calibrate_range(const NgramLM& lm,
                           const std::vector<LabeledSequence>& corpus,
                           double accept_percentile);

struct Discriminator {
    NgramLM lm;
    ScoreRange range;

    double score(const LabeledSequence& seq) const { return perplexity(lm, seq); }
    bool accept(double perp) const { return judge(perp, range); }
};

}  // namespace seqmix
