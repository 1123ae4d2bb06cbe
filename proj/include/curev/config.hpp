#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curev/corpus.hpp"
#include "curev/curation.hpp"
#include "curev/judge.hpp"
#include "curev/metrics/codebleu.hpp"

namespace curev {

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

/// Settings shared by the subcommands, read from a JSON file. Relative paths
/// resolve against the file's directory; input paths must exist at load.
///
///   {
///     "paths": {"corpus": "...", "out_dir": "...", "fixtures": "...", "prompts": "..."},
///     "judge": {"backend": "mock", "endpoint": "...", "model": "...", "max_parallel": 4, ...},
///     "filter": {"threshold": 4},
///     "seeds": {"split": 42, "pairing": 42},
///     "field_mapping": {"id": "id", "language": "lang", ...},
///     "codebleu_weights": [0.25, 0.25, 0.25, 0.25],
///     "taskprep": {"train_fraction": 0.75, "pairs": null, "sampling": "uniform"},
///     "annotate": {"port": 8765, "annotators": ["A", "B"]}
///   }
struct PipelineConfig {
    std::optional<std::filesystem::path> corpus;
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::filesystem::path> fixtures;
    std::optional<std::filesystem::path> prompts;

    std::string backend = "mock";  // "mock" or "remote"
    judge::JudgeConfig judge;
    int threshold = curation::kDefaultRelevanceThreshold;
    std::uint64_t split_seed = 42;
    std::uint64_t pairing_seed = 42;
    corpus::FieldMapping field_mapping;
    metrics::CodeBleuWeights codebleu_weights;
    double train_fraction = 0.75;
    std::optional<std::size_t> pairs;
    corpus::Sampling sampling = corpus::Sampling::uniform;
    int port = 8765;
    std::vector<std::string> annotators{"A", "B"};

    /// Throws ConfigError naming the offending key.
    static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
    static PipelineConfig load(const std::filesystem::path& file);
};

}  // namespace curev
