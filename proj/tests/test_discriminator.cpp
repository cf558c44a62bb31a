#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "seqmix/discriminator.hpp"
#include "seqmix/rng.hpp"

using namespace seqmix;
using seqmix::testing::bio_labels;
using seqmix::testing::make_seq;

namespace {

LabeledSequence tokens_only(const std::vector<std::string>& toks) {
    LabelSet labels = bio_labels({});
    return make_seq(labels, toks, std::vector<std::string>(toks.size(), "O"));
}

// independent re-computation: explicit loop summing log2 probabilities
double perplexity_oracle(const NgramLM& lm, const LabeledSequence& seq) {
    std::vector<std::string> padded;
    for (std::size_t i = 0; i + 1 < lm.order(); ++i) padded.push_back("<s>");
    for (const auto& t : seq.tokens) padded.push_back(t.surface);
    double sum = 0.0;
    for (std::size_t i = lm.order() - 1; i < padded.size(); ++i) {
        std::vector<std::string> ctx(padded.begin() + i - (lm.order() - 1),
                                     padded.begin() + i);
        sum += std::log2(lm.probability(ctx, padded[i]));
    }
    return std::pow(2.0, -sum / static_cast<double>(seq.length()));
}

}  // namespace

TEST_CASE("train_lm bigram counts on a two-token corpus") {
    auto lm = train_lm({tokens_only({"a", "b"})}, 2);
    CHECK(lm.ngram_count({"<s>"}, "a") == 1);
    CHECK(lm.ngram_count({"a"}, "b") == 1);
    CHECK(lm.ngram_count({"b"}, "</s>") == 1);
    CHECK(lm.ngram_count({"a"}, "a") == 0);
}

TEST_CASE("retraining gives identical counts") {
    std::vector<LabeledSequence> corpus{tokens_only({"x", "y", "x"}),
                                        tokens_only({"y", "y"})};
    auto a = train_lm(corpus, 3);
    auto b = train_lm(corpus, 3);
    std::ostringstream sa, sb;
    a.save(sa);
    b.save(sb);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("context counts equal context occurrence counts") {
    std::vector<LabeledSequence> corpus{tokens_only({"a", "b", "a", "b", "c"}),
                                        tokens_only({"b", "a"})};
    auto lm = train_lm(corpus, 2);
    // independent recount of how often each unigram context occurs
    std::map<std::string, std::size_t> occurrences;
    for (const auto& seq : corpus) {
        occurrences["<s>"] += 1;
        for (const auto& t : seq.tokens) occurrences[t.surface] += 1;
    }
    for (const auto& [ctx, n] : occurrences) {
        CHECK(lm.context_count({ctx}) == n);
    }
}

TEST_CASE("uniform unigram model has perplexity V") {
    NgramLM lm(1, 0.1, 40);  // no counts: every probability is 1/V
    auto seq = tokens_only({"p", "q", "r"});
    CHECK(perplexity(lm, seq) == doctest::Approx(40.0).epsilon(1e-9));
}

TEST_CASE("hand-computed perplexity of probabilities 1/2, 1/4, 1/8 is 4") {
    // add-k with k=1, V=2: p = (c + 1) / (n + 2). Arrange the contexts of
    // "w1 w2 w3" to have c=0 and n = 0, 2, 6 so p = 1/2, 1/4, 1/8.
    NgramLM lm(2, 1.0, 2);
    lm.observe({"w1"}, "z");
    lm.observe({"w1"}, "z");
    for (int i = 0; i < 6; ++i) lm.observe({"w2"}, "z");
    auto seq = tokens_only({"w1", "w2", "w3"});
    CHECK(lm.probability({"<s>"}, "w1") == doctest::Approx(0.5));
    CHECK(lm.probability({"w1"}, "w2") == doctest::Approx(0.25));
    CHECK(lm.probability({"w2"}, "w3") == doctest::Approx(0.125));
    CHECK(perplexity(lm, seq) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("perplexity ignores trailing padding tokens") {
    std::vector<LabeledSequence> corpus{tokens_only({"a", "b", "c"})};
    auto lm = train_lm(corpus, 2);
    auto plain = tokens_only({"a", "b", "c"});
    auto padded = tokens_only({"a", "b", "c", "<pad>", "<pad>"});
    CHECK(perplexity(lm, padded) == doctest::Approx(perplexity(lm, plain)).epsilon(1e-12));
}

TEST_CASE("trained sequences score lower than random ones") {
    Rng rng(31);
    std::vector<LabeledSequence> corpus;
    std::vector<std::string> vocab;
    for (int i = 0; i < 30; ++i) vocab.push_back("w" + std::to_string(i));
    for (int s = 0; s < 50; ++s) {
        // patterned sentences: consecutive vocabulary runs
        std::size_t start = rng() % 25;
        std::vector<std::string> toks;
        for (std::size_t k = 0; k < 5; ++k) toks.push_back(vocab[start + k % 5]);
        corpus.push_back(tokens_only(toks));
    }
    auto lm = train_lm(corpus, 3);
    int wins = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto& real = corpus[rng() % corpus.size()];
        std::vector<std::string> toks;
        for (std::size_t k = 0; k < real.length(); ++k) {
            toks.push_back(vocab[rng() % vocab.size()]);
        }
        if (perplexity(lm, real) < perplexity(lm, tokens_only(toks))) ++wins;
    }
    CHECK(wins >= 95);
}

TEST_CASE("perplexity matches the brute-force oracle on random fixtures") {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t order = 1 + rng() % 3;
        std::vector<LabeledSequence> corpus;
        std::vector<std::string> vocab;
        for (int i = 0; i < 10; ++i) vocab.push_back("v" + std::to_string(i));
        for (int s = 0; s < 5; ++s) {
            std::vector<std::string> toks;
            for (std::size_t k = 0; k < 1 + rng() % 6; ++k) {
                toks.push_back(vocab[rng() % vocab.size()]);
            }
            corpus.push_back(tokens_only(toks));
        }
        auto lm = train_lm(corpus, order);
        std::vector<std::string> toks;
        for (std::size_t k = 0; k < 1 + rng() % 6; ++k) {
            toks.push_back(vocab[rng() % vocab.size()]);
        }
        auto seq = tokens_only(toks);
        double got = perplexity(lm, seq);
        double want = perplexity_oracle(lm, seq);
        CHECK(got == doctest::Approx(want).epsilon(1e-9));
        CHECK(got >= 1.0 - 1e-12);
    }
}

TEST_CASE("judge is inclusive at both ends and monotone in range") {
    ScoreRange r{0, 500};
    CHECK_FALSE(judge(877, r));
    CHECK(judge(332, r));
    CHECK(judge(500.0, r));
    CHECK(judge(0.0, r));
    CHECK_FALSE(judge(500.0000001, r));

    // A subset of B: accepted by A implies accepted by B
    ScoreRange a{10, 100}, b{0, 500};
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
        double p = uniform01(rng) * 600;
        if (judge(p, a)) CHECK(judge(p, b));
    }
}

TEST_CASE("calibrate_range nearest-rank percentiles") {
    std::vector<LabeledSequence> corpus;
    // identical sentences: one perplexity value
    for (int i = 0; i < 5; ++i) corpus.push_back(tokens_only({"a", "b"}));
    auto lm = train_lm(corpus, 2);
    auto full = calibrate_range(lm, corpus, 1.0);
    CHECK(full.s2 == doctest::Approx(perplexity(lm, corpus[0])));

    // 11 distinct values: the 50th percentile is the 6th smallest
    std::vector<LabeledSequence> eleven;
    for (int i = 0; i < 11; ++i) {
        std::vector<std::string> toks;
        for (int k = 0; k <= i; ++k) toks.push_back("u" + std::to_string(k));
        eleven.push_back(tokens_only(toks));
    }
    auto lm2 = train_lm(eleven, 2);
    std::vector<double> scores;
    for (const auto& s : eleven) scores.push_back(perplexity(lm2, s));
    std::sort(scores.begin(), scores.end());
    auto mid = calibrate_range(lm2, eleven, 0.5);
    CHECK(mid.s2 == doctest::Approx(scores[5]));
    CHECK(mid.s1 == 0.0);
    auto max = calibrate_range(lm2, eleven, 1.0);
    CHECK(max.s2 == doctest::Approx(scores.back()));
}

TEST_CASE("LM persists through save/load") {
    std::vector<LabeledSequence> corpus{tokens_only({"a", "b", "c"}),
                                        tokens_only({"b", "c", "a"})};
    auto lm = train_lm(corpus, 3, 0.25);
    std::stringstream buf;
    lm.save(buf);
    auto loaded = NgramLM::load(buf);
    CHECK(loaded.order() == 3);
    CHECK(loaded.smoothing_k() == 0.25);
    CHECK(loaded.vocab_size() == lm.vocab_size());
    for (const auto& seq : corpus) {
        CHECK(perplexity(loaded, seq) == doctest::Approx(perplexity(lm, seq)));
    }
}
