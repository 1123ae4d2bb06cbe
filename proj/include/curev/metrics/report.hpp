#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curev/corpus.hpp"
#include "curev/metrics/bleu.hpp"
#include "curev/metrics/codebleu.hpp"
#include "curev/metrics/exact_match.hpp"

namespace curev::metrics {

struct TextRecord {
    std::string id;
    std::string text;
};

/// Reads `{id, text}` lines; throws on duplicates or malformed records.
std::vector<TextRecord> load_texts(const std::filesystem::path& path);

struct EvalOptions {
    std::optional<corpus::Language> language;  // CodeBLEU is skipped when unset
    CodeBleuWeights weights;
    MatchMode match_mode = MatchMode::normalized;
    bool diff_new_side = false;  // score the post-change side of unified diffs with CodeBLEU
    Execution exec = Execution::parallel;
};

struct MetricReport {
    double bleu = 0.0;
    std::optional<CodeBleuScore> codebleu;
    std::size_t exact_match_count = 0;
    std::size_t total = 0;
};

/// Aligns both lists by id; throws MetricError when the id sets differ.
MetricReport evaluate(const std::vector<TextRecord>& candidates, const std::vector<TextRecord>& references,
                      const EvalOptions& options);

nlohmann::json report_to_json(const MetricReport& report);
/// Scores in [0,1] with BLEU also shown on the 0-100 scale.
std::string render_report(const MetricReport& report);

}  // namespace curev::metrics
