// Microbenchmarks for the hot paths: nearest-neighbor lookup during mixing,
// perplexity scoring, tagger prediction, and a full generation pass.

#include <benchmark/benchmark.h>

#include "seqmix/discriminator.hpp"
#include "seqmix/embedding.hpp"
#include "seqmix/mixer.hpp"
#include "seqmix/synthetic.hpp"
#include "seqmix/tagger.hpp"

using namespace seqmix;

namespace {

EmbeddingTable make_random_table(std::size_t vocab, std::size_t dim) {
    Rng rng(42);
    std::vector<std::string> names;
    std::vector<double> rows;
    for (std::size_t v = 0; v < vocab; ++v) {
        names.push_back("t" + std::to_string(v));
        for (std::size_t k = 0; k < dim; ++k) rows.push_back(uniform01(rng) * 2 - 1);
    }
    return EmbeddingTable(std::move(names), std::move(rows), dim);
}

void bm_mix_and_lookup(benchmark::State& state) {
    const std::size_t vocab = static_cast<std::size_t>(state.range(0));
    EmbeddingTable table = make_random_table(vocab, 16);
    std::unordered_set<std::size_t> excluded{0, 1};
    for (auto _ : state) {
        auto result = mix_and_lookup(table.row(0), table.row(1), 0.39, table, excluded);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(bm_mix_and_lookup)->Arg(1000)->Arg(10000);

void bm_perplexity(benchmark::State& state) {
    SynthConfig sc;
    sc.sentences = 500;
    auto corpus = make_synthetic_corpus(sc);
    NgramLM lm = train_lm(corpus, 3, 0.1);
    for (auto _ : state) {
        double p = perplexity(lm, corpus[state.iterations() % corpus.size()]);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(bm_perplexity);

void bm_predict_dist(benchmark::State& state) {
    SynthConfig sc;
    sc.sentences = 100;
    auto corpus = make_synthetic_corpus(sc);
    LabelSet labels = synthetic_label_set(sc.entity_types);
    EmbeddingTable table = derive_cooccurrence_embeddings(corpus, 16, 2, 42);
    TaggerModel model(labels, table.dim());
    Rng rng(42);
    for (double& w : model.weights()) w = uniform01(rng) - 0.5;
    for (auto _ : state) {
        auto dists = predict_dist(model, corpus[state.iterations() % corpus.size()],
                                  table);
        benchmark::DoNotOptimize(dists);
    }
}
BENCHMARK(bm_predict_dist);

void bm_generate(benchmark::State& state) {
    SynthConfig sc;
    sc.sentences = 50;
    auto corpus = make_synthetic_corpus(sc);
    LabelSet labels = synthetic_label_set(sc.entity_types);
    EmbeddingTable table = derive_cooccurrence_embeddings(corpus, 16, 2, 42);
    Discriminator disc;
    disc.lm = train_lm(corpus, 3, 0.1);
    disc.range = calibrate_range(disc.lm, corpus, 0.9);
    MixConfig cfg;
    for (auto _ : state) {
        auto records = generate(corpus, cfg, table, disc, 10, labels.outside_index(),
                                42);
        benchmark::DoNotOptimize(records);
    }
}
BENCHMARK(bm_generate);

}  // namespace

BENCHMARK_MAIN();
