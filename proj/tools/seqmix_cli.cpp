// Command-line front end: run / augment / sweep / score / eval.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "seqmix/config.hpp"
#include "seqmix/loop.hpp"
#include "seqmix/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace seqmix;

namespace {

std::vector<LabeledSequence> load_conll_file(const std::string& path,
                                             const LabelSet& labels) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open corpus file: " + path);
    return parse_conll(in, labels);
}

LabelSet labels_from_files(const std::vector<std::string>& paths) {
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (const auto& path : paths) {
        if (path.empty()) continue;
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open corpus file: " + path);
        LabelSet ls = collect_labels(in);
        for (const auto& n : ls.names()) {
            if (seen.insert(n).second) names.push_back(n);
        }
    }
    std::sort(names.begin(), names.end());
    return LabelSet(std::move(names));
}

EmbeddingTable resolve_table(const RunConfig& cfg,
                             const std::vector<LabeledSequence>& train_corpus) {
    if (!cfg.data.embeddings.empty()) {
        std::ifstream in(cfg.data.embeddings);
        if (!in) throw ConfigError("cannot open embeddings: " + cfg.data.embeddings);
        return load_embeddings(in);
    }
    return derive_cooccurrence_embeddings(train_corpus, cfg.embedding.dim,
                                          cfg.embedding.window,
                                          cfg.experiment.master_seed);
}

json record_to_json(const GenerationRecord& rec) {
    json j;
    json toks = json::array();
    for (const auto& t : rec.child.tokens) toks.push_back(t.surface);
    j["tokens"] = toks;
    json dists = json::array();
    for (const auto& d : rec.child.labels) dists.push_back(d.probs);
    j["label_dists"] = dists;
    j["parents"] = {rec.parent_ids.first, rec.parent_ids.second};
    j["lambda"] = rec.lambda;
    if (rec.window_offsets) {
        j["window_offsets"] = {rec.window_offsets->first, rec.window_offsets->second};
    } else {
        j["window_offsets"] = nullptr;
    }
    j["perplexity"] = rec.perplexity;
    j["accepted"] = rec.accepted;
    return j;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << content;
    }
    fs::rename(tmp, path);
}

std::string curve_to_csv(const LearningCurve& curve, std::size_t repeats,
                         const std::string& extra_header = "",
                         const std::string& extra_value = "") {
    std::ostringstream out;
    out << (extra_header.empty() ? "" : extra_header + ",") << curve_csv_header()
        << '\n';
    for (const auto& r : curve) {
        out << (extra_value.empty() ? "" : extra_value + ",") << curve_csv_row(r)
            << '\n';
    }
    // mean rows across repeats, keyed by round
    std::map<std::size_t, std::vector<const RoundRecord*>> by_round;
    for (const auto& r : curve) by_round[r.round].push_back(&r);
    for (const auto& [round, rows] : by_round) {
        double n = static_cast<double>(rows.size());
        auto mean = [&](auto get) {
            double s = 0.0;
            for (const auto* r : rows) s += static_cast<double>(get(*r));
            return s / n;
        };
        out << (extra_value.empty() ? "" : extra_value + ",") << "mean," << round
            << ',' << rows.front()->data_usage << ',' << rows.front()->policy << ','
            << rows.front()->variant << ','
            << mean([](const RoundRecord& r) { return r.n_augmented; });
        out.precision(6);
        out << std::fixed;
        for (double v : {mean([](const RoundRecord& r) { return r.precision_dev; }),
                         mean([](const RoundRecord& r) { return r.recall_dev; }),
                         mean([](const RoundRecord& r) { return r.f1_dev; }),
                         mean([](const RoundRecord& r) { return r.precision_test; }),
                         mean([](const RoundRecord& r) { return r.recall_test; }),
                         mean([](const RoundRecord& r) { return r.f1_test; })}) {
            out << ',' << v;
        }
        out << '\n';
        out.unsetf(std::ios::fixed);
    }
    (void)repeats;
    return out.str();
}

LearningCurve run_all_repeats(const RunConfig& cfg,
                              const std::vector<LabeledSequence>& train_corpus,
                              const std::vector<LabeledSequence>& dev_corpus,
                              const std::vector<LabeledSequence>& test_corpus,
                              const EmbeddingTable& table, const LabelSet& labels,
                              std::vector<GenerationRecord>* audit,
                              TaggerModel* last_model = nullptr) {
    LearningCurve curve;
    for (std::size_t rep = 0; rep < cfg.experiment.repeats; ++rep) {
        PoolState pool;
        auto part = run_experiment(cfg.experiment, train_corpus, dev_corpus,
                                   test_corpus, table, labels, rep, audit, &pool);
        curve.insert(curve.end(), part.begin(), part.end());
        if (last_model && rep + 1 == cfg.experiment.repeats) {
            TrainConfig tc = cfg.experiment.train;
            tc.seed = cfg.experiment.master_seed;
            TaggerModel init(labels, table.dim(), tc.seed);
            *last_model = train(init, pool.training_set(), tc, table);
        }
    }
    return curve;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& save_model) {
    RunConfig cfg = load_run_config(config_path, overrides);
    if (cfg.data.train.empty() || cfg.data.dev.empty() || cfg.data.test.empty()) {
        throw ConfigError("run requires data.train, data.dev, and data.test paths");
    }
    fs::create_directories(cfg.output_dir);
    write_text_atomic(fs::path(cfg.output_dir) / "manifest.json",
                      build_manifest(cfg).dump(2) + "\n");

    LabelSet labels = labels_from_files({cfg.data.train, cfg.data.dev, cfg.data.test});
    auto train_corpus = load_conll_file(cfg.data.train, labels);
    auto dev_corpus = load_conll_file(cfg.data.dev, labels);
    auto test_corpus = load_conll_file(cfg.data.test, labels);
    EmbeddingTable table = resolve_table(cfg, train_corpus);

    std::vector<GenerationRecord> audit;
    TaggerModel model(labels, table.dim());
    auto curve = run_all_repeats(cfg, train_corpus, dev_corpus, test_corpus, table,
                                 labels, &audit, save_model.empty() ? nullptr : &model);

    write_text_atomic(fs::path(cfg.output_dir) / "curve.csv",
                      curve_to_csv(curve, cfg.experiment.repeats));
    std::ostringstream jl;
    for (const auto& rec : audit) jl << record_to_json(rec).dump() << '\n';
    write_text_atomic(fs::path(cfg.output_dir) / "audit.jsonl", jl.str());
    if (!save_model.empty()) {
        std::ofstream out(save_model);
        model.save(out);
    }
    std::cout << "wrote " << (fs::path(cfg.output_dir) / "curve.csv").string() << " ("
              << curve.size() << " rows)\n";
    return 0;
}

int cmd_augment(const std::string& input, const std::string& embeddings_path,
                const std::string& out_path, std::size_t n,
                const std::vector<std::string>& overrides) {
    RunConfig cfg = load_run_config("", overrides);
    LabelSet labels = labels_from_files({input});
    auto corpus = load_conll_file(input, labels);
    cfg.data.embeddings = embeddings_path;
    EmbeddingTable table = resolve_table(cfg, corpus);

    Discriminator disc;
    disc.lm = train_lm(corpus, cfg.experiment.discriminator.order,
                       cfg.experiment.discriminator.smoothing_k);
    disc.range = cfg.experiment.discriminator.calibrate
                     ? calibrate_range(disc.lm, corpus,
                                       cfg.experiment.discriminator.accept_percentile)
                     : cfg.experiment.discriminator.fixed_range;

    MixConfig mix = cfg.experiment.mix;
    mix.seed = cfg.experiment.master_seed;
    auto records =
        generate(corpus, mix, table, disc, n, labels.outside_index(), mix.seed);

    std::ostringstream jl;
    std::size_t accepted = 0;
    for (const auto& rec : records) {
        jl << record_to_json(rec).dump() << '\n';
        if (rec.accepted) ++accepted;
    }
    if (out_path.empty() || out_path == "-") {
        std::cout << jl.str();
    } else {
        write_text_atomic(out_path, jl.str());
    }
    std::cerr << "accepted " << accepted << " of " << n << " requested ("
              << records.size() << " candidates)\n";
    return 0;
}

int cmd_score(const std::string& input, std::size_t order, double smoothing_k,
              double percentile) {
    LabelSet labels = labels_from_files({input});
    auto corpus = load_conll_file(input, labels);
    NgramLM lm = train_lm(corpus, order, smoothing_k);
    std::vector<double> scores;
    scores.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        double p = perplexity(lm, corpus[i]);
        scores.push_back(p);
        std::cout << i << '\t' << p << '\n';
    }
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    auto rank = [&](double q) {
        std::size_t r = static_cast<std::size_t>(
            std::ceil(q * static_cast<double>(sorted.size())));
        r = std::clamp<std::size_t>(r, 1, sorted.size());
        return sorted[r - 1];
    };
    std::cout << "# percentiles: p50=" << rank(0.5) << " p90=" << rank(0.9)
              << " p99=" << rank(0.99) << " max=" << sorted.back() << '\n';
    std::cout << "# calibrated s2 (p=" << percentile << "): " << rank(percentile)
              << '\n';
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const std::string& embeddings_path, std::size_t dim, std::size_t window,
             std::uint64_t seed) {
    std::ifstream min(model_path);
    if (!min) throw ConfigError("cannot open model checkpoint: " + model_path);
    TaggerModel model = TaggerModel::load(min);
    auto data = load_conll_file(data_path, model.label_set());
    EmbeddingTable table = [&] {
        if (!embeddings_path.empty()) {
            std::ifstream in(embeddings_path);
            if (!in) throw ConfigError("cannot open embeddings: " + embeddings_path);
            return load_embeddings(in);
        }
        return derive_cooccurrence_embeddings(data, dim, window, seed);
    }();
    auto [p, r, f1] = evaluate_f1(model, data, table);
    std::cout << "precision " << p << "\nrecall " << r << "\nf1 " << f1 << '\n';
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<std::string>& values,
              const std::vector<std::string>& overrides) {
    RunConfig base = load_run_config(config_path, overrides);
    if (base.data.train.empty()) {
        throw ConfigError("sweep requires data paths in the config");
    }
    LabelSet labels =
        labels_from_files({base.data.train, base.data.dev, base.data.test});
    auto train_corpus = load_conll_file(base.data.train, labels);
    auto dev_corpus = load_conll_file(base.data.dev, labels);
    auto test_corpus = load_conll_file(base.data.test, labels);
    EmbeddingTable table = resolve_table(base, train_corpus);

    std::ostringstream out;
    bool first = true;
    for (const auto& value : values) {
        RunConfig cfg = base;
        if (param == "augment_rate_r") {
            cfg.experiment.mix.augment_rate_r = std::stod(value);
        } else if (param == "alpha") {
            cfg.experiment.mix.alpha = std::stod(value);
        } else if (param == "window") {
            auto colon = value.find(':');
            if (colon == std::string::npos) {
                throw ConfigError("window sweep values are s:n, e.g. 5:3");
            }
            cfg.experiment.mix.window_s = std::stoul(value.substr(0, colon));
            cfg.experiment.mix.min_valid_n = std::stoul(value.substr(colon + 1));
        } else if (param == "score_range") {
            if (value == "inf" || value == "calibrated") {
                cfg.experiment.discriminator.calibrate = (value == "calibrated");
                if (value == "inf") {
                    cfg.experiment.discriminator.fixed_range = {
                        0.0, std::numeric_limits<double>::infinity()};
                }
            } else if (value.rfind("p", 0) == 0) {
                cfg.experiment.discriminator.calibrate = true;
                cfg.experiment.discriminator.accept_percentile =
                    std::stod(value.substr(1)) / 100.0;
            } else {
                auto colon = value.find(':');
                if (colon == std::string::npos) {
                    throw ConfigError(
                        "score_range values are s1:s2, pNN, inf, or calibrated");
                }
                cfg.experiment.discriminator.calibrate = false;
                cfg.experiment.discriminator.fixed_range = {
                    std::stod(value.substr(0, colon)), std::stod(value.substr(colon + 1))};
            }
        } else {
            throw ConfigError("unknown sweep parameter: " + param);
        }
        auto curve = run_all_repeats(cfg, train_corpus, dev_corpus, test_corpus, table,
                                     labels, nullptr);
        std::string cell = curve_to_csv(curve, cfg.experiment.repeats, param, value);
        if (!first) {
            cell = cell.substr(cell.find('\n') + 1);  // drop repeated header
        }
        out << cell;
        first = false;
    }
    fs::create_directories(base.output_dir);
    fs::path out_path = fs::path(base.output_dir) / ("sweep_" + param + ".csv");
    write_text_atomic(out_path, out.str());
    std::cout << "wrote " << out_path.string() << '\n';
    return 0;
}

// "--mix.alpha 8" style dotted flags become config overrides
std::vector<std::string> extract_dotted_overrides(std::vector<std::string>& args) {
    std::vector<std::string> overrides;
    for (auto it = args.begin(); it != args.end();) {
        const std::string& a = *it;
        if (a.rfind("--", 0) == 0 && a.find('.') != std::string::npos) {
            std::string key = a.substr(2);
            auto eq = key.find('=');
            if (eq != std::string::npos) {
                overrides.push_back(key);
                it = args.erase(it);
            } else if (std::next(it) != args.end()) {
                overrides.push_back(key + "=" + *std::next(it));
                it = args.erase(it, std::next(it, 2));
            } else {
                throw ConfigError("flag needs a value: " + a);
            }
        } else {
            ++it;
        }
    }
    return overrides;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::vector<std::string> overrides;
    try {
        overrides = extract_dotted_overrides(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    CLI::App app{"SeqMix: active sequence labeling with mixup augmentation"};
    app.require_subcommand(1);

    std::string config_path, save_model;
    std::string input, embeddings_path, out_path, model_path, data_path;
    std::string policy, variant, sweep_param;
    std::vector<std::string> sweep_values;
    std::size_t n = 0, order = 3, dim = 16, window = 2;
    double smoothing_k = 0.1, percentile = 0.9;
    std::uint64_t seed = 0;
    std::vector<std::string> set_overrides;

    auto* run = app.add_subcommand("run", "Run the full active learning experiment");
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--policy", policy, "query policy: random|lc|nte|qbc");
    run->add_option("--variant", variant, "mix variant: whole|sub|label_constrained_sub");
    run->add_option("--set", set_overrides, "config override key=value");
    run->add_option("--save-model", save_model, "write final tagger checkpoint here");

    auto* augment = app.add_subcommand("augment", "One SeqMix pass over a corpus");
    augment->add_option("input", input, "CoNLL input file")->required();
    augment->add_option("--embeddings", embeddings_path, "embedding table file");
    augment->add_option("-n,--num", n, "number of accepted generations requested")
        ->required();
    augment->add_option("-o,--out", out_path, "output JSONL path (default stdout)");
    augment->add_option("--variant", variant, "mix variant");
    augment->add_option("--set", set_overrides, "config override key=value");

    auto* sweep = app.add_subcommand("sweep", "Parameter sweep over one knob");
    sweep->add_option("--config", config_path, "JSON config file")->required();
    sweep->add_option("--param", sweep_param,
                      "one of: score_range, augment_rate_r, window, alpha")
        ->required();
    sweep->add_option("--values", sweep_values, "swept values")->required();
    sweep->add_option("--set", set_overrides, "config override key=value");

    auto* score = app.add_subcommand("score", "Per-sequence perplexity report");
    score->add_option("input", input, "CoNLL input file")->required();
    score->add_option("--order", order, "n-gram order");
    score->add_option("--smoothing-k", smoothing_k, "add-k smoothing constant");
    score->add_option("--calibrate-percentile", percentile, "acceptance percentile");

    auto* eval = app.add_subcommand("eval", "Span F1 of a saved model on a corpus");
    eval->add_option("--model", model_path, "tagger checkpoint")->required();
    eval->add_option("--data", data_path, "CoNLL corpus")->required();
    eval->add_option("--embeddings", embeddings_path, "embedding table file");
    eval->add_option("--dim", dim, "derived embedding dimension");
    eval->add_option("--window", window, "co-occurrence window");
    eval->add_option("--seed", seed, "derivation seed");

    std::reverse(args.begin(), args.end());  // CLI11 takes the vector reversed
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    overrides.insert(overrides.end(), set_overrides.begin(), set_overrides.end());
    if (!policy.empty()) overrides.push_back("policy=" + policy);
    if (!variant.empty()) overrides.push_back("mix.variant=" + variant);

    try {
        if (app.got_subcommand(run)) {
            return cmd_run(config_path, overrides, save_model);
        }
        if (app.got_subcommand(augment)) {
            return cmd_augment(input, embeddings_path, out_path, n, overrides);
        }
        if (app.got_subcommand(sweep)) {
            return cmd_sweep(config_path, sweep_param, sweep_values, overrides);
        }
        if (app.got_subcommand(score)) {
            return cmd_score(input, order, smoothing_k, percentile);
        }
        if (app.got_subcommand(eval)) {
            return cmd_eval(model_path, data_path, embeddings_path, dim, window, seed);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
