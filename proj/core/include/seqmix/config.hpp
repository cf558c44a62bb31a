#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seqmix/loop.hpp"

namespace seqmix {

struct DataPaths {
    std::string train;
    std::string dev;
    std::string test;
    std::string embeddings;  // empty: derive from the training corpus
};

struct EmbeddingConfig {
    std::size_t dim = 16;
    std::size_t window = 2;
};

struct RunConfig {
    ExperimentConfig experiment;
    DataPaths data;
    EmbeddingConfig embedding;
    std::string output_dir = ".";
};

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr const char* kOutputDirEnvVar = "SEQMIX_OUTPUT_DIR";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// JSON config with flat dotted command-line overrides applied on top
// ("mix.alpha=8"). Unknown keys are errors.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides);
nlohmann::json run_config_to_json(const RunConfig& cfg);

std::string sha256_file(const std::string& path);

// Resolved config snapshot + version + seed + input digests; enough to
// reproduce the run bit-exactly.
nlohmann::json build_manifest(const RunConfig& cfg);

}  // namespace seqmix
