#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "seqmix/mixer.hpp"

using namespace seqmix;
using seqmix::testing::bio_labels;
using seqmix::testing::make_seq;
using seqmix::testing::make_table;

namespace {

LabelSet ner_labels() { return bio_labels({"ORG", "LOC", "PER"}); }

EmbeddingTable grid_table() {
    return make_table(
        {"<unk>", "alpha", "beta", "gamma", "delta", "eps", "zeta", "theta"},
        {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}, {2, 2}, {3, 1}});
}

Discriminator accept_all() {
    Discriminator d;
    d.lm = NgramLM(1, 0.1, 10);
    d.range = {0.0, std::numeric_limits<double>::infinity()};
    return d;
}

}  // namespace

TEST_CASE("valid_label_density counts non-O argmax positions") {
    LabelSet labels = ner_labels();
    auto seq = make_seq(labels, {"a", "b", "c", "d", "e"},
                        {"B-ORG", "O", "I-ORG", "O", "B-LOC"});
    CHECK(valid_label_density(seq.labels, labels.outside_index()) ==
          doctest::Approx(0.6));
    auto all_o = make_seq(labels, {"a", "b"}, {"O", "O"});
    CHECK(valid_label_density(all_o.labels, labels.outside_index()) == 0.0);
    auto all_valid = make_seq(labels, {"a", "b"}, {"B-ORG", "I-ORG"});
    CHECK(valid_label_density(all_valid.labels, labels.outside_index()) == 1.0);
}

TEST_CASE("pair_eligible whole-sequence variant") {
    LabelSet labels = ner_labels();
    MixConfig cfg;
    cfg.variant = MixVariant::whole;
    cfg.window_s = 5;
    cfg.min_valid_n = 3;  // eta0 = 0.6
    auto a = make_seq(labels, {"a", "b", "c", "d", "e"},
                      {"B-ORG", "O", "I-ORG", "O", "B-LOC"});  // 0.6
    auto b = make_seq(labels, {"p", "q", "r", "s", "t"},
                      {"B-PER", "I-PER", "O", "B-LOC", "I-LOC"});  // 0.8
    auto desc = pair_eligible(a, b, cfg, labels.outside_index());
    REQUIRE(desc.has_value());
    CHECK(desc->variant == MixVariant::whole);
    CHECK_FALSE(desc->offsets.has_value());

    auto weak = make_seq(labels, {"p", "q", "r", "s", "t"},
                         {"B-PER", "I-PER", "O", "O", "O"});  // 0.4
    CHECK_FALSE(pair_eligible(a, weak, cfg, labels.outside_index()).has_value());

    auto longer = make_seq(labels, {"p", "q", "r", "s", "t", "u"},
                           {"B-PER", "I-PER", "B-LOC", "B-ORG", "O", "O"});
    CHECK_FALSE(pair_eligible(a, longer, cfg, labels.outside_index()).has_value());
}

TEST_CASE("pair_eligible sub variant takes the leftmost eligible window") {
    LabelSet labels = ner_labels();
    MixConfig cfg;
    cfg.variant = MixVariant::sub;
    cfg.window_s = 3;
    cfg.min_valid_n = 2;  // eta0 = 2/3
    auto a = make_seq(labels, {"COLORADO", "10", "St", "x", "y"},
                      {"B-ORG", "O", "I-ORG", "O", "O"});
    auto b = make_seq(labels, {"u", "Slovenia", ",", "Kwasniewski", "v"},
                      {"O", "B-LOC", "O", "B-PER", "O"});
    auto desc = pair_eligible(a, b, cfg, labels.outside_index());
    REQUIRE(desc.has_value());
    CHECK(desc->offsets == std::make_pair<std::size_t, std::size_t>(0, 1));

    auto no_window = make_seq(labels, {"u", "v", "w"}, {"O", "O", "B-PER"});
    CHECK_FALSE(pair_eligible(a, no_window, cfg, labels.outside_index()).has_value());
}

TEST_CASE("pair_eligible label-constrained variant needs identical window labels") {
    LabelSet labels = ner_labels();
    MixConfig cfg;
    cfg.variant = MixVariant::label_constrained_sub;
    cfg.window_s = 3;
    cfg.min_valid_n = 2;
    auto a = make_seq(labels, {"a1", "a2", "a3", "a4"}, {"O", "B-PER", "I-PER", "O"});
    auto b = make_seq(labels, {"b1", "b2", "b3", "b4", "b5"},
                      {"O", "O", "B-PER", "I-PER", "O"});
    auto desc = pair_eligible(a, b, cfg, labels.outside_index());
    REQUIRE(desc.has_value());
    // lexicographically first match: windows [0,3) of a and [1,4) of b are
    // both (O, B-PER, I-PER)
    CHECK(desc->offsets == std::make_pair<std::size_t, std::size_t>(0, 1));

    auto c = make_seq(labels, {"c1", "c2", "c3"}, {"B-LOC", "I-LOC", "O"});
    CHECK_FALSE(pair_eligible(a, c, cfg, labels.outside_index()).has_value());
}

TEST_CASE("mix_pair interpolates labels and splices windows") {
    LabelSet labels = ner_labels();
    auto table = grid_table();
    MixConfig cfg;
    cfg.variant = MixVariant::sub;
    cfg.window_s = 2;
    cfg.min_valid_n = 2;
    cfg.alpha = 8.0;
    auto a = make_seq(labels, {"alpha", "beta", "gamma"}, {"B-ORG", "I-ORG", "O"});
    auto b = make_seq(labels, {"delta", "eps", "zeta"}, {"O", "B-LOC", "I-LOC"});
    auto desc = pair_eligible(a, b, cfg, labels.outside_index());
    REQUIRE(desc.has_value());
    CHECK(desc->offsets == std::make_pair<std::size_t, std::size_t>(0, 1));

    Rng rng(4);
    auto children = mix_pair(a, b, *desc, cfg, table, rng);
    REQUIRE(children.size() == 2);
    double lambda = *children[0].lambda;
    CHECK(lambda >= 0.0);
    CHECK(lambda <= 1.0);
    for (const auto& child : children) {
        CHECK(child.provenance == Provenance::generated);
        for (const auto& d : child.labels) CHECK(d.is_simplex(1e-9));
    }
    // outside the window, tokens and labels are the parent's verbatim
    CHECK(children[0].tokens[2].surface == "gamma");
    CHECK(children[0].labels[2].probs == a.labels[2].probs);
    CHECK(children[1].tokens[0].surface == "delta");
    CHECK(children[1].labels[0].probs == b.labels[0].probs);
    // window position 0 mixes B-ORG (from a) with B-LOC (from b)
    auto b_org = *labels.index_of("B-ORG");
    auto b_loc = *labels.index_of("B-LOC");
    CHECK(children[0].labels[0].probs[b_org] == doctest::Approx(lambda));
    CHECK(children[0].labels[0].probs[b_loc] == doctest::Approx(1.0 - lambda));
    // both children share the mixed window content
    CHECK(children[0].tokens[0].surface == children[1].tokens[1].surface);
    // parents at each position were excluded from the lookup
    CHECK(children[0].tokens[0].surface != "alpha");
    CHECK(children[0].tokens[0].surface != "eps");
}

TEST_CASE("label-constrained mixing keeps labels verbatim") {
    LabelSet labels = ner_labels();
    auto table = grid_table();
    MixConfig cfg;
    cfg.variant = MixVariant::label_constrained_sub;
    cfg.window_s = 3;
    cfg.min_valid_n = 2;
    auto a = make_seq(labels, {"alpha", "beta", "gamma"}, {"B-PER", "I-PER", "O"});
    auto b = make_seq(labels, {"delta", "eps", "zeta"}, {"B-PER", "I-PER", "O"});
    auto desc = pair_eligible(a, b, cfg, labels.outside_index());
    REQUIRE(desc.has_value());
    Rng rng(1);
    auto children = mix_pair(a, b, *desc, cfg, table, rng);
    REQUIRE(children.size() == 2);
    for (std::size_t t = 0; t < 3; ++t) {
        CHECK(children[0].labels[t].probs == a.labels[t].probs);
        CHECK(children[1].labels[t].probs == b.labels[t].probs);
    }
}

TEST_CASE("whole-sequence children deduplicate to one") {
    LabelSet labels = ner_labels();
    auto table = grid_table();
    MixConfig cfg;
    cfg.variant = MixVariant::whole;
    cfg.window_s = 2;
    cfg.min_valid_n = 1;
    auto a = make_seq(labels, {"alpha", "beta"}, {"B-ORG", "O"});
    auto b = make_seq(labels, {"delta", "eps"}, {"B-LOC", "O"});
    auto desc = pair_eligible(a, b, cfg, labels.outside_index());
    REQUIRE(desc.has_value());
    Rng rng(2);
    auto children = mix_pair(a, b, *desc, cfg, table, rng);
    CHECK(children.size() == 1);
}

TEST_CASE("lambda endpoints reproduce the parent labels exactly") {
    LabelSet labels = ner_labels();
    auto table = grid_table();
    MixConfig cfg;
    cfg.variant = MixVariant::sub;
    cfg.window_s = 2;
    cfg.min_valid_n = 2;
    auto a = make_seq(labels, {"alpha", "beta", "gamma"}, {"B-ORG", "I-ORG", "O"});
    auto b = make_seq(labels, {"delta", "eps", "zeta"}, {"O", "B-LOC", "I-LOC"});
    auto desc = pair_eligible(a, b, cfg, labels.outside_index());
    REQUIRE(desc.has_value());

    for (double target : {0.0, 1.0}) {
        auto children = mix_pair_with_lambda(a, b, *desc, cfg, table, target);
        REQUIRE(children.size() == 2);
        const auto& child_a = children[0];
        const auto& expect = (target == 1.0) ? a : b;
        std::size_t off = (target == 1.0) ? desc->offsets->first : desc->offsets->second;
        for (std::size_t t = 0; t < cfg.window_s; ++t) {
            CHECK(child_a.labels[desc->offsets->first + t].probs ==
                  expect.labels[off + t].probs);
            // mixed token is the nearest non-excluded neighbor of the
            // surviving parent's own embedding
            const auto& tok_a = a.tokens[desc->offsets->first + t];
            const auto& tok_b = b.tokens[desc->offsets->second + t];
            std::unordered_set<std::size_t> excluded;
            if (auto id = table.id_of(tok_a.surface)) excluded.insert(*id);
            if (auto id = table.id_of(tok_b.surface)) excluded.insert(*id);
            auto survivor = table.lookup((target == 1.0 ? tok_a : tok_b).surface);
            auto [id, surface] =
                mix_and_lookup(survivor, survivor, 0.5, table, excluded);
            CHECK(child_a.tokens[desc->offsets->first + t].surface == surface);
        }
    }
}

TEST_CASE("Beta(8,8) sample mean is near one half") {
    Rng rng(123);
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) sum += sample_beta(rng, 8.0);
    CHECK(std::abs(sum / n - 0.5) < 0.02);
}

TEST_CASE("generate respects the budget and records rejects") {
    LabelSet labels = ner_labels();
    auto table = grid_table();
    MixConfig cfg;
    cfg.variant = MixVariant::sub;
    cfg.window_s = 2;
    cfg.min_valid_n = 2;
    std::vector<LabeledSequence> batch{
        make_seq(labels, {"alpha", "beta", "gamma"}, {"B-ORG", "I-ORG", "O"}),
        make_seq(labels, {"delta", "eps", "zeta"}, {"B-LOC", "I-LOC", "O"}),
        make_seq(labels, {"theta", "alpha", "beta"}, {"O", "B-PER", "I-PER"}),
    };
    auto disc = accept_all();

    auto records = generate(batch, cfg, table, disc, 2, labels.outside_index(), 9);
    std::size_t accepted = 0;
    for (const auto& r : records) {
        if (r.accepted) ++accepted;
        CHECK(r.lambda >= 0.0);
        CHECK(r.lambda <= 1.0);
    }
    CHECK(accepted <= 2);
    CHECK(accepted > 0);

    CHECK(generate(batch, cfg, table, disc, 0, labels.outside_index(), 9).empty());

    std::vector<LabeledSequence> ineligible{
        make_seq(labels, {"alpha", "beta"}, {"O", "O"}),
        make_seq(labels, {"delta", "eps"}, {"O", "O"})};
    CHECK(generate(ineligible, cfg, table, disc, 4, labels.outside_index(), 9).empty());
}

TEST_CASE("generate is deterministic and never duplicates accepted children") {
    LabelSet labels = ner_labels();
    auto table = grid_table();
    MixConfig cfg;
    cfg.variant = MixVariant::sub;
    cfg.window_s = 2;
    cfg.min_valid_n = 1;
    std::vector<LabeledSequence> batch;
    for (const char* t1 : {"alpha", "beta", "gamma", "delta"}) {
        for (const char* t2 : {"eps", "zeta"}) {
            batch.push_back(make_seq(labels, {t1, t2}, {"B-ORG", "O"}));
        }
    }
    auto disc = accept_all();
    auto r1 = generate(batch, cfg, table, disc, 6, labels.outside_index(), 55);
    auto r2 = generate(batch, cfg, table, disc, 6, labels.outside_index(), 55);
    REQUIRE(r1.size() == r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i) {
        CHECK(r1[i].lambda == r2[i].lambda);
        CHECK(r1[i].accepted == r2[i].accepted);
        CHECK(r1[i].perplexity == r2[i].perplexity);
    }
    // accepted children are pairwise distinct and differ from every parent
    std::vector<const LabeledSequence*> accepted;
    for (const auto& r : r1) {
        if (r.accepted) accepted.push_back(&r.child);
    }
    auto same = [](const LabeledSequence& x, const LabeledSequence& y) {
        if (x.length() != y.length()) return false;
        for (std::size_t t = 0; t < x.length(); ++t) {
            if (x.tokens[t].surface != y.tokens[t].surface) return false;
            if (x.labels[t].argmax() != y.labels[t].argmax()) return false;
        }
        return true;
    };
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        for (std::size_t j = i + 1; j < accepted.size(); ++j) {
            CHECK_FALSE(same(*accepted[i], *accepted[j]));
        }
        for (const auto& member : batch) {
            CHECK_FALSE(same(*accepted[i], member));
        }
    }
}
