#include "seqmix/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <sstream>

namespace seqmix {

namespace {

bool valid_bio_name(const std::string& name) {
    if (name == "O") return true;
    if (name.size() < 3) return false;
    if (name[0] != 'B' && name[0] != 'I') return false;
    return name[1] == '-';
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream iss(line);
    std::vector<std::string> cols;
    std::string col;
    while (iss >> col) cols.push_back(col);
    return cols;
}

}  // namespace

LabelSet::LabelSet(std::vector<std::string> names) : names_(std::move(names)) {
    std::set<std::string> seen;
    bool has_outside = false;
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (!seen.insert(names_[i]).second) {
            throw ParseError("duplicate label name: " + names_[i]);
        }
        if (!valid_bio_name(names_[i])) {
            throw ParseError("label is not BIO-shaped: " + names_[i]);
        }
        if (names_[i] == "O") {
            outside_index_ = i;
            has_outside = true;
        }
    }
    if (!has_outside) throw ParseError("label set lacks the \"O\" label");
}

std::optional<std::size_t> LabelSet::index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

LabelDist LabelDist::one_hot(std::size_t m, std::size_t index) {
    LabelDist d;
    d.probs.assign(m, 0.0);
    d.probs.at(index) = 1.0;
    return d;
}

bool LabelDist::is_hard() const {
    for (double p : probs) {
        if (p != 0.0 && p != 1.0) return false;
    }
    return std::count(probs.begin(), probs.end(), 1.0) == 1;
}

std::size_t LabelDist::argmax() const {
    return static_cast<std::size_t>(
        std::max_element(probs.begin(), probs.end()) - probs.begin());
}

bool LabelDist::is_simplex(double tol) const {
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= tol;
}

LabelSet collect_labels(std::istream& in) {
    std::set<std::string> tags;
    std::string line;
    while (std::getline(in, line)) {
        auto cols = split_ws(line);
        if (cols.empty() || cols[0].rfind("-DOCSTART-", 0) == 0) continue;
        tags.insert(cols.back());
    }
    tags.insert("O");
    return LabelSet(std::vector<std::string>(tags.begin(), tags.end()));
}

std::vector<LabeledSequence> parse_conll(std::istream& in, const LabelSet& labels,
                                         std::size_t max_len) {
    std::vector<LabeledSequence> out;
    LabeledSequence cur;
    bool truncating = false;
    std::string line;
    std::size_t lineno = 0;
    auto flush = [&] {
        if (!cur.tokens.empty()) out.push_back(std::move(cur));
        cur = LabeledSequence{};
        truncating = false;
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto cols = split_ws(line);
        if (cols.empty()) {
            flush();
            continue;
        }
        if (cols[0].rfind("-DOCSTART-", 0) == 0) continue;
        const std::string& surface = cols.front();
        const std::string& tag = cols.back();
        auto idx = labels.index_of(tag);
        if (!idx) {
            throw ParseError("line " + std::to_string(lineno) + ": unknown tag \"" +
                             tag + "\"");
        }
        if (cur.tokens.size() >= max_len) {
            if (!truncating) {
                std::cerr << "warning: truncating sentence at line " << lineno
                          << " to " << max_len << " tokens\n";
                truncating = true;
            }
            continue;
        }
        cur.tokens.push_back(Token{surface, std::nullopt});
        cur.labels.push_back(LabelDist::one_hot(labels.size(), *idx));
    }
    flush();
    return out;
}

std::string serialize_conll(const std::vector<LabeledSequence>& seqs,
                            const LabelSet& labels) {
    std::ostringstream out;
    for (const auto& seq : seqs) {
        for (std::size_t t = 0; t < seq.tokens.size(); ++t) {
            if (!seq.labels[t].is_hard()) {
                throw ParseError("cannot serialize soft-labeled sequence");
            }
            out << seq.tokens[t].surface << ' ' << labels.name(seq.labels[t].argmax())
                << '\n';
        }
        out << '\n';
    }
    return out.str();
}

std::vector<Span> extract_spans(const LabeledSequence& seq, const LabelSet& labels) {
    std::vector<Span> spans;
    std::optional<Span> open;
    auto close = [&] {
        if (open) {
            spans.push_back(*open);
            open.reset();
        }
    };
    for (std::size_t t = 0; t < seq.labels.size(); ++t) {
        const std::string& name = labels.name(seq.labels[t].argmax());
        if (name == "O") {
            close();
            continue;
        }
        const char prefix = name[0];
        const std::string type = name.substr(2);
        if (prefix == 'B' || !open || open->entity_type != type) {
            close();
            open = Span{t, t + 1, type};
        } else {
            open->end = t + 1;
        }
    }
    close();
    return spans;
}

}  // namespace seqmix
