#include "seqmix/discriminator.hpp"

#include "seqmix/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace seqmix {

namespace {

std::string join_context(const std::vector<std::string>& context) {
    std::string key;
    for (const auto& c : context) {
        if (!key.empty()) key.push_back('\x1f');
        key += c;
    }
    return key;
}

// trailing "<pad>" tokens are not part of the sequence proper
std::size_t unpadded_length(const LabeledSequence& seq) {
    std::size_t t_len = seq.length();
    while (t_len > 0 && seq.tokens[t_len - 1].surface == "<pad>") --t_len;
    return t_len;
}

std::vector<std::string> padded_tokens(const LabeledSequence& seq, std::size_t order) {
    std::vector<std::string> toks;
    const std::size_t t_len = unpadded_length(seq);
    toks.reserve(t_len + order);
    for (std::size_t i = 0; i + 1 < order; ++i) toks.push_back(kSentenceStart);
    for (std::size_t i = 0; i < t_len; ++i) toks.push_back(seq.tokens[i].surface);
    return toks;
}

}  // namespace

void NgramLM::observe(const std::vector<std::string>& context,
                      const std::string& token) {
    ++counts_[join_context(context)][token];
}

std::size_t NgramLM::ngram_count(const std::vector<std::string>& context,
                                 const std::string& token) const {
    auto it = counts_.find(join_context(context));
    if (it == counts_.end()) return 0;
    auto jt = it->second.find(token);
    return jt == it->second.end() ? 0 : jt->second;
}

std::size_t NgramLM::context_count(const std::vector<std::string>& context) const {
    auto it = counts_.find(join_context(context));
    if (it == counts_.end()) return 0;
    std::size_t total = 0;
    for (const auto& [tok, c] : it->second) total += c;
    return total;
}

double NgramLM::probability(const std::vector<std::string>& context,
                            const std::string& token) const {
    double v = static_cast<double>(std::max<std::size_t>(vocab_size_, 1));
    double num = static_cast<double>(ngram_count(context, token)) + smoothing_k_;
    double den = static_cast<double>(context_count(context)) + smoothing_k_ * v;
    return num / den;
}

void NgramLM::save(std::ostream& out) const {
    out << "seqmix-ngramlm v1\n";
    out << order_ << ' ' << smoothing_k_ << ' ' << vocab_size_ << '\n';
    for (const auto& [ctx, followers] : counts_) {
        for (const auto& [tok, c] : followers) {
            std::string readable = ctx;
            std::replace(readable.begin(), readable.end(), '\x1f', ' ');
            out << readable << '\t' << tok << '\t' << c << '\n';
        }
    }
}

NgramLM NgramLM::load(std::istream& in) {
    std::string magic, version;
    in >> magic >> version;
    if (magic != "seqmix-ngramlm" || version != "v1") {
        throw FormatError("unrecognized LM file header");
    }
    std::size_t order, vocab;
    double k;
    in >> order >> k >> vocab;
    in.ignore();
    NgramLM lm(order, k, vocab);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto tab1 = line.find('\t');
        auto tab2 = line.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos) {
            throw FormatError("malformed LM line: " + line);
        }
        std::string ctx = line.substr(0, tab1);
        std::string tok = line.substr(tab1 + 1, tab2 - tab1 - 1);
        std::size_t count = std::stoull(line.substr(tab2 + 1));
        std::istringstream iss(ctx);
        std::vector<std::string> context;
        std::string w;
        while (iss >> w) context.push_back(w);
        lm.counts_[join_context(context)][tok] = count;
    }
    return lm;
}

NgramLM train_lm(const std::vector<LabeledSequence>& corpus, std::size_t order,
                 double smoothing_k) {
    NgramLM lm(order, smoothing_k);
    std::set<std::string> vocab;
    for (const auto& seq : corpus) {
        auto toks = padded_tokens(seq, order);
        toks.push_back(kSentenceEnd);
        for (const auto& t : seq.tokens) vocab.insert(t.surface);
        for (std::size_t i = order > 1 ? order - 1 : 0; i < toks.size(); ++i) {
            std::vector<std::string> context(
                toks.begin() + static_cast<long>(i - (order - 1)),
                toks.begin() + static_cast<long>(i));
            lm.observe(context, toks[i]);
        }
    }
    vocab.insert(kSentenceEnd);
    lm.set_vocab_size(vocab.size());
    return lm;
}

double perplexity(const NgramLM& lm, const LabeledSequence& seq) {
    const std::size_t order = lm.order();
    auto toks = padded_tokens(seq, order);
    const std::size_t t_len = unpadded_length(seq);
    double log2_sum = 0.0;
    for (std::size_t i = 0; i < t_len; ++i) {
        std::size_t pos = i + (order - 1);
        std::vector<std::string> context(
            toks.begin() + static_cast<long>(pos - (order - 1)),
            toks.begin() + static_cast<long>(pos));
        log2_sum += std::log2(lm.probability(context, toks[pos]));
    }
    return std::exp2(-log2_sum / static_cast<double>(t_len));
}

bool judge(double perp, const ScoreRange& range) {
    return range.s1 <= perp && perp <= range.s2;
}

ScoreRange calibrate_range(const NgramLM& lm,
                           const std::vector<LabeledSequence>& corpus,
                           double accept_percentile) {
    std::vector<double> scores;
    scores.reserve(corpus.size());
    for (const auto& seq : corpus) scores.push_back(perplexity(lm, seq));
    std::sort(scores.begin(), scores.end());
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(accept_percentile * static_cast<double>(scores.size())));
    rank = std::clamp<std::size_t>(rank, 1, scores.size());
    return ScoreRange{0.0, scores[rank - 1]};
}

}  // namespace seqmix
