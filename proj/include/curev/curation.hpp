#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curev/corpus.hpp"
#include "curev/judge.hpp"
#include "curev/labels.hpp"

namespace curev::curation {

inline constexpr int kDefaultRelevanceThreshold = 4;

class MissingJudgment : public Error {
public:
    explicit MissingJudgment(const std::string& id) : Error("curation", "MissingJudgment(" + id + ")"), id_(id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class CurationError : public Error {
public:
    explicit CurationError(const std::string& what) : Error("curation", what) {}
};

using JudgmentIndex = std::map<std::string, Judgment, std::less<>>;

JudgmentIndex index_judgments(const std::vector<judge::JudgedRecord>& records);

struct FilterResult {
    corpus::Corpus kept;
    std::vector<std::string> removed;  // corpus order
};

/// Removes every sample whose relevance is strictly below `threshold`.
/// Throws MissingJudgment for a sample without a judgment and CurationError
/// for a threshold outside 1..10.
FilterResult filter_irrelevant(const corpus::Corpus& corpus, const JudgmentIndex& judgments,
                               int threshold = kDefaultRelevanceThreshold);

struct CuratedSample {
    std::string id;
    std::string comment_original;
    std::string reformulated_comment;
    int carried_relevance = 0;
    PostJudgment post_judgment;

    bool operator==(const CuratedSample&) const = default;
};

struct CurationRun {
    std::vector<CuratedSample> curated;            // ascending id
    std::vector<judge::FailedSample> quarantined;  // ascending id
};

/// Reformulates each kept comment, then re-evaluates the reformulation with
/// relevance left out. Relevance is carried over from the original judgment.
/// Samples whose calls or replies fail are quarantined, not dropped.
CurationRun curate(const corpus::Corpus& kept, const JudgmentIndex& judgments, judge::Backend& backend,
                   const judge::JudgeConfig& config,
                   const judge::PromptTemplates& templates = judge::PromptTemplates::defaults(),
                   const judge::SleepFn& sleep = {});

nlohmann::json curated_to_json(const CuratedSample& sample);
CuratedSample curated_from_json(const nlohmann::json& j);
std::vector<CuratedSample> load_curated(const std::filesystem::path& path);
void save_curated(const std::filesystem::path& path, const std::vector<CuratedSample>& curated);

struct MeanShift {
    std::optional<double> before;
    std::optional<double> after;
    std::optional<double> delta() const {
        if (!before || !after) return std::nullopt;
        return *after - *before;
    }
};

/// One row of the clarity/conciseness evolution table.
struct EvolutionRow {
    std::string category;     // "Type", "Nature", "Civility", "Average"
    std::string subcategory;  // "--" for the Average row
    MeanShift clarity;
    MeanShift conciseness;
};

struct ProportionRow {
    std::string category;
    std::string subcategory;
    std::size_t before_count = 0;
    double before_pct = 0.0;
    std::size_t after_count = 0;
    double after_pct = 0.0;
};

struct CivilityCounts {
    std::string population;  // which corpus the counts cover
    std::size_t total = 0;
    std::size_t civil = 0;
    std::size_t uncivil = 0;
};

struct CurationReport {
    std::size_t total_in = 0;
    std::vector<std::string> removed_ids;
    std::size_t kept = 0;
    std::size_t curated = 0;
    std::size_t quarantined = 0;

    std::vector<EvolutionRow> evolution;    // Type, Nature, Civility rows then Average
    std::vector<ProportionRow> nature;      // before = original, after = curated
    std::vector<ProportionRow> civility;
    std::vector<CivilityCounts> civility_populations;  // pre-filter, post-filter, curated
};

/// Clarity/conciseness means before (all `original` judgments, grouped by
/// their labels) and after (curated re-evaluations; Type grouped by the
/// original labels, Nature and Civility by the re-evaluated labels), plus the
/// Nature/Civility proportion shifts. Throws CurationError when a curated id
/// has no original judgment.
CurationReport evolution_report(const std::vector<judge::JudgedRecord>& original,
                                const std::vector<CuratedSample>& curated);

/// Adds the filter/quarantine bookkeeping; total_in = removed + kept and
/// kept = curated + quarantined.
CurationReport make_report(const std::vector<judge::JudgedRecord>& original,
                           const std::vector<CuratedSample>& curated, const std::vector<std::string>& removed_ids,
                           std::size_t quarantined);

nlohmann::json report_to_json(const CurationReport& report);
/// Text layout: Category | Subcategory | Clarity | Conciseness with
/// "after (arrow delta)" cells, then the proportion tables.
std::string render_report(const CurationReport& report);

}  // namespace curev::curation
