#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "seqmix/corpus.hpp"

using namespace seqmix;
using seqmix::testing::bio_labels;
using seqmix::testing::make_seq;

TEST_CASE("parse_conll reads token and tag columns") {
    LabelSet labels = bio_labels({"ORG"});
    std::istringstream in("EU B-ORG\nrejects O\n\n");
    auto seqs = parse_conll(in, labels);
    REQUIRE(seqs.size() == 1);
    REQUIRE(seqs[0].length() == 2);
    CHECK(seqs[0].tokens[0].surface == "EU");
    CHECK(seqs[0].labels[0].argmax() == *labels.index_of("B-ORG"));
    CHECK(seqs[0].labels[1].argmax() == labels.outside_index());
    for (const auto& d : seqs[0].labels) CHECK(d.is_hard());
}

TEST_CASE("parse_conll skips document markers") {
    LabelSet labels = bio_labels({"ORG"});
    std::istringstream in("-DOCSTART- O\n\n");
    CHECK(parse_conll(in, labels).empty());
}

TEST_CASE("parse_conll empty stream gives empty list") {
    LabelSet labels = bio_labels({});
    std::istringstream in("");
    CHECK(parse_conll(in, labels).empty());
}

TEST_CASE("parse_conll multi-column lines use first and last columns") {
    LabelSet labels = bio_labels({"PER"});
    std::istringstream in("John NNP I-NP B-PER\n\n");
    auto seqs = parse_conll(in, labels);
    REQUIRE(seqs.size() == 1);
    CHECK(seqs[0].tokens[0].surface == "John");
    CHECK(seqs[0].labels[0].argmax() == *labels.index_of("B-PER"));
}

TEST_CASE("parse_conll unknown tag names the line") {
    LabelSet labels = bio_labels({"ORG"});
    std::istringstream in("EU B-ORG\nfoo B-BAD\n");
    CHECK_THROWS_WITH_AS(parse_conll(in, labels),
                         doctest::Contains("line 2"), ParseError);
}

TEST_CASE("parse_conll truncates at max length") {
    LabelSet labels = bio_labels({});
    std::ostringstream file;
    for (int i = 0; i < 150; ++i) file << "tok" << i << " O\n";
    file << "\n";
    std::istringstream in(file.str());
    auto seqs = parse_conll(in, labels);
    REQUIRE(seqs.size() == 1);
    CHECK(seqs[0].length() == kDefaultMaxSeqLen);
}

TEST_CASE("serialize_conll emits one line per token") {
    LabelSet labels = bio_labels({"ORG"});
    auto seq = make_seq(labels, {"EU"}, {"B-ORG"});
    CHECK(serialize_conll({seq}, labels) == "EU B-ORG\n\n");
}

TEST_CASE("serialize_conll rejects soft labels") {
    LabelSet labels = bio_labels({"ORG"});
    LabeledSequence seq;
    seq.tokens.push_back(Token{"EU", std::nullopt});
    seq.labels.push_back(LabelDist{{0.5, 0.3, 0.2}});
    CHECK_THROWS_AS(serialize_conll({seq}, labels), ParseError);
}

TEST_CASE("parse/serialize round-trip is the identity on normalized form") {
    LabelSet labels = bio_labels({"PER", "LOC"});
    std::string fixture =
        "John B-PER\nSmith I-PER\nlives O\nin O\nParis B-LOC\n\n"
        "nothing O\nhere O\n\n"
        "Anna B-PER\n\n";
    std::istringstream in(fixture);
    auto seqs = parse_conll(in, labels);
    REQUIRE(seqs.size() == 3);
    std::string serialized = serialize_conll(seqs, labels);
    CHECK(serialized == fixture);
    std::istringstream again(serialized);
    auto reparsed = parse_conll(again, labels);
    CHECK(serialize_conll(reparsed, labels) == serialized);
}

TEST_CASE("extract_spans basic runs") {
    LabelSet labels = bio_labels({"PER", "LOC"});
    auto seq = make_seq(labels, {"a", "b", "c"}, {"B-PER", "I-PER", "O"});
    auto spans = extract_spans(seq, labels);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0] == Span{0, 2, "PER"});

    auto none = make_seq(labels, {"a", "b", "c"}, {"O", "O", "O"});
    CHECK(extract_spans(none, labels).empty());
}

namespace {

// independent oracle: walk positions, B- or type-switching I- starts a span
std::vector<Span> span_oracle(const std::vector<std::string>& tags) {
    std::vector<Span> out;
    for (std::size_t t = 0; t < tags.size(); ++t) {
        if (tags[t] == "O") continue;
        std::string type = tags[t].substr(2);
        bool continues = tags[t][0] == 'I' && t > 0 && tags[t - 1] != "O" &&
                         tags[t - 1].substr(2) == type;
        if (continues) {
            out.back().end = t + 1;
        } else {
            out.push_back(Span{t, t + 1, type});
        }
    }
    return out;
}

}  // namespace

TEST_CASE("extract_spans matches oracle on all length-3 BIO strings") {
    LabelSet labels = bio_labels({"PER", "LOC"});
    const auto& names = labels.names();
    for (std::size_t a = 0; a < names.size(); ++a) {
        for (std::size_t b = 0; b < names.size(); ++b) {
            for (std::size_t c = 0; c < names.size(); ++c) {
                std::vector<std::string> tags{names[a], names[b], names[c]};
                auto seq = make_seq(labels, {"x", "y", "z"}, tags);
                auto got = extract_spans(seq, labels);
                auto want = span_oracle(tags);
                CAPTURE(tags[0] + " " + tags[1] + " " + tags[2]);
                CHECK(got == want);
                // spans sorted and non-overlapping
                for (std::size_t i = 1; i < got.size(); ++i) {
                    CHECK(got[i - 1].end <= got[i].start);
                }
            }
        }
    }
}

TEST_CASE("stray I-X opens a new span") {
    LabelSet labels = bio_labels({"PER", "LOC"});
    auto seq = make_seq(labels, {"x", "y"}, {"B-PER", "I-LOC"});
    auto spans = extract_spans(seq, labels);
    REQUIRE(spans.size() == 2);
    CHECK(spans[0] == Span{0, 1, "PER"});
    CHECK(spans[1] == Span{1, 2, "LOC"});
}
