#include "seqmix/config.hpp"

#include <array>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace seqmix {

using nlohmann::json;

namespace {

// minimal SHA-256, FIPS 180-4
class Sha256 {
  public:
    void update(const unsigned char* data, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) {
            buf_[buflen_++] = data[i];
            if (buflen_ == 64) {
                compress();
                buflen_ = 0;
                total_ += 64;
            }
        }
    }

    std::string hex_digest() {
        total_ += buflen_;
        std::uint64_t bits = total_ * 8;
        buf_[buflen_++] = 0x80;
        while (buflen_ != 56) {
            if (buflen_ == 64) {
                compress();
                buflen_ = 0;
            }
            buf_[buflen_++] = 0;
        }
        for (int i = 7; i >= 0; --i) buf_[buflen_++] = (bits >> (i * 8)) & 0xff;
        compress();
        std::ostringstream out;
        out << std::hex;
        for (std::uint32_t h : state_) {
            for (int i = 7; i >= 0; --i) out << ((h >> (i * 4)) & 0xf);
        }
        return out.str();
    }

  private:
    static constexpr std::array<std::uint32_t, 64> k_ = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
        0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
        0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
        0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
        0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
        0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
        0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
        0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
        0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
        0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

    static std::uint32_t rotr(std::uint32_t x, int n) {
        return (x >> n) | (x << (32 - n));
    }

    void compress() {
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i) {
            w[i] = (buf_[i * 4] << 24) | (buf_[i * 4 + 1] << 16) |
                   (buf_[i * 4 + 2] << 8) | buf_[i * 4 + 3];
        }
        for (int i = 16; i < 64; ++i) {
            std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        auto s = state_;
        for (int i = 0; i < 64; ++i) {
            std::uint32_t s1 = rotr(s[4], 6) ^ rotr(s[4], 11) ^ rotr(s[4], 25);
            std::uint32_t ch = (s[4] & s[5]) ^ (~s[4] & s[6]);
            std::uint32_t t1 = s[7] + s1 + ch + k_[i] + w[i];
            std::uint32_t s0 = rotr(s[0], 2) ^ rotr(s[0], 13) ^ rotr(s[0], 22);
            std::uint32_t maj = (s[0] & s[1]) ^ (s[0] & s[2]) ^ (s[1] & s[2]);
            std::uint32_t t2 = s0 + maj;
            s[7] = s[6]; s[6] = s[5]; s[5] = s[4]; s[4] = s[3] + t1;
            s[3] = s[2]; s[2] = s[1]; s[1] = s[0]; s[0] = t1 + t2;
        }
        for (int i = 0; i < 8; ++i) state_[i] += s[i];
    }

    std::array<std::uint32_t, 8> state_ = {0x6a09e667, 0xbb67ae85, 0x3c6ef372,
                                           0xa54ff53a, 0x510e527f, 0x9b05688c,
                                           0x1f83d9ab, 0x5be0cd19};
    unsigned char buf_[64];
    std::size_t buflen_ = 0;
    std::uint64_t total_ = 0;
};

template <typename T>
void read_key(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& scope) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw ConfigError("unknown config key: " +
                              (scope.empty() ? key : scope + "." + key));
        }
    }
}

}  // namespace

RunConfig parse_run_config(const json& j) {
    RunConfig cfg;
    ExperimentConfig& e = cfg.experiment;
    check_keys(j,
               {"seed_size", "rounds", "per_round_k", "policy", "committee", "mix",
                "train", "discriminator", "repeats", "master_seed", "parents", "data",
                "embedding", "output_dir"},
               "");
    read_key(j, "seed_size", e.seed_size);
    read_key(j, "rounds", e.rounds);
    if (j.contains("per_round_k")) {
        if (j["per_round_k"].is_array()) {
            e.per_round_k = j["per_round_k"].get<std::vector<std::size_t>>();
        } else {
            e.per_round_k = {j["per_round_k"].get<std::size_t>()};
        }
    }
    if (j.contains("policy")) e.policy.variant = parse_policy(j["policy"]);
    read_key(j, "committee", e.policy.committee_size);
    if (e.policy.variant == Policy::qbc && e.policy.committee_size < 2) {
        throw ConfigError("committee must be >= 2 for the qbc policy");
    }
    if (j.contains("mix")) {
        const json& m = j["mix"];
        check_keys(m, {"alpha", "variant", "window_s", "min_valid_n", "augment_rate_r"},
                   "mix");
        read_key(m, "alpha", e.mix.alpha);
        if (m.contains("variant")) e.mix.variant = parse_mix_variant(m["variant"]);
        read_key(m, "window_s", e.mix.window_s);
        read_key(m, "min_valid_n", e.mix.min_valid_n);
        read_key(m, "augment_rate_r", e.mix.augment_rate_r);
        if (e.mix.min_valid_n > e.mix.window_s) {
            throw ConfigError("mix.min_valid_n must not exceed mix.window_s");
        }
        if (e.mix.alpha <= 0.0) throw ConfigError("mix.alpha must be positive");
    }
    if (j.contains("train")) {
        const json& t = j["train"];
        check_keys(t, {"epochs", "learning_rate", "batch_size", "warm_start"}, "train");
        read_key(t, "epochs", e.train.epochs);
        read_key(t, "learning_rate", e.train.learning_rate);
        read_key(t, "batch_size", e.train.batch_size);
        read_key(t, "warm_start", e.train.warm_start);
    }
    if (j.contains("discriminator")) {
        const json& d = j["discriminator"];
        check_keys(d, {"order", "smoothing_k", "calibrate", "accept_percentile",
                       "score_range"},
                   "discriminator");
        read_key(d, "order", e.discriminator.order);
        read_key(d, "smoothing_k", e.discriminator.smoothing_k);
        read_key(d, "calibrate", e.discriminator.calibrate);
        read_key(d, "accept_percentile", e.discriminator.accept_percentile);
        if (d.contains("score_range")) {
            auto r = d["score_range"].get<std::vector<double>>();
            if (r.size() != 2 || r[0] > r[1]) {
                throw ConfigError("discriminator.score_range must be [s1, s2], s1 <= s2");
            }
            e.discriminator.fixed_range = {r[0], r[1]};
            e.discriminator.calibrate = false;
        }
    }
    read_key(j, "repeats", e.repeats);
    read_key(j, "master_seed", e.master_seed);
    if (j.contains("parents")) {
        std::string p = j["parents"];
        if (p == "batch") e.parents_all_labeled = false;
        else if (p == "all_labeled") e.parents_all_labeled = true;
        else throw ConfigError("parents must be \"batch\" or \"all_labeled\"");
    }
    if (j.contains("data")) {
        const json& d = j["data"];
        check_keys(d, {"train", "dev", "test", "embeddings"}, "data");
        read_key(d, "train", cfg.data.train);
        read_key(d, "dev", cfg.data.dev);
        read_key(d, "test", cfg.data.test);
        read_key(d, "embeddings", cfg.data.embeddings);
    }
    if (j.contains("embedding")) {
        const json& em = j["embedding"];
        check_keys(em, {"dim", "window"}, "embedding");
        read_key(em, "dim", cfg.embedding.dim);
        read_key(em, "window", cfg.embedding.window);
    }
    read_key(j, "output_dir", cfg.output_dir);
    if (cfg.output_dir == ".") {
        if (const char* env = std::getenv(kOutputDirEnvVar)) cfg.output_dir = env;
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides) {
    json j;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        try {
            in >> j;
        } catch (const json::parse_error& e) {
            throw ConfigError("config parse error in " + path + ": " + e.what());
        }
    } else {
        j = json::object();
    }
    for (const auto& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("override must be key=value: " + ov);
        }
        std::string keypath = ov.substr(0, eq);
        std::string value = ov.substr(eq + 1);
        json* node = &j;
        std::size_t pos = 0;
        for (;;) {
            auto dot = keypath.find('.', pos);
            std::string part = keypath.substr(pos, dot - pos);
            if (dot == std::string::npos) {
                json parsed = json::parse(value, nullptr, false);
                (*node)[part] = parsed.is_discarded() ? json(value) : parsed;
                break;
            }
            node = &(*node)[part];
            pos = dot + 1;
        }
    }
    return parse_run_config(j);
}

json run_config_to_json(const RunConfig& cfg) {
    const ExperimentConfig& e = cfg.experiment;
    json j;
    j["seed_size"] = e.seed_size;
    j["rounds"] = e.rounds;
    j["per_round_k"] = e.per_round_k;
    j["policy"] = policy_name(e.policy.variant);
    j["committee"] = e.policy.committee_size;
    j["mix"] = {{"alpha", e.mix.alpha},
                {"variant", mix_variant_name(e.mix.variant)},
                {"window_s", e.mix.window_s},
                {"min_valid_n", e.mix.min_valid_n},
                {"augment_rate_r", e.mix.augment_rate_r}};
    j["train"] = {{"epochs", e.train.epochs},
                  {"learning_rate", e.train.learning_rate},
                  {"batch_size", e.train.batch_size},
                  {"warm_start", e.train.warm_start}};
    j["discriminator"] = {{"order", e.discriminator.order},
                          {"smoothing_k", e.discriminator.smoothing_k},
                          {"calibrate", e.discriminator.calibrate},
                          {"accept_percentile", e.discriminator.accept_percentile}};
    if (!e.discriminator.calibrate) {
        j["discriminator"]["score_range"] = {e.discriminator.fixed_range.s1,
                                             e.discriminator.fixed_range.s2};
    }
    j["repeats"] = e.repeats;
    j["master_seed"] = e.master_seed;
    j["parents"] = e.parents_all_labeled ? "all_labeled" : "batch";
    j["data"] = {{"train", cfg.data.train},
                 {"dev", cfg.data.dev},
                 {"test", cfg.data.test},
                 {"embeddings", cfg.data.embeddings}};
    j["embedding"] = {{"dim", cfg.embedding.dim}, {"window", cfg.embedding.window}};
    j["output_dir"] = cfg.output_dir;
    return j;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file for digest: " + path);
    Sha256 h;
    char buf[8192];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        h.update(reinterpret_cast<const unsigned char*>(buf),
                 static_cast<std::size_t>(in.gcount()));
    }
    return h.hex_digest();
}

json build_manifest(const RunConfig& cfg) {
    json m;
    m["artifact_version"] = kArtifactVersion;
    m["master_seed"] = cfg.experiment.master_seed;
    m["config"] = run_config_to_json(cfg);
    json digests = json::object();
    for (const std::string& path :
         {cfg.data.train, cfg.data.dev, cfg.data.test, cfg.data.embeddings}) {
        if (!path.empty()) digests[path] = sha256_file(path);
    }
    m["input_digests"] = digests;
    auto now = std::chrono::system_clock::now();
    m["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
            .count();
    return m;
}

}  // namespace seqmix
