#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curev/error.hpp"
#include "curev/judge.hpp"
#include "curev/labels.hpp"

namespace curev::stats {

class StatsError : public Error {
public:
    explicit StatsError(const std::string& what) : Error("stats", what) {}
};

struct CategoryShare {
    std::string category;
    std::string subcategory;
    std::size_t count = 0;
    double percentage = 0.0;  // of the corpus; multi-label shares may sum past 100
};

/// Every Type, Nature and Civility subcategory in framework order.
/// Throws StatsError on an empty corpus.
std::vector<CategoryShare> category_distribution(const std::vector<Labels>& labels);

struct MeanRow {
    std::string category;     // "Average" for the overall row
    std::string subcategory;  // "--" for the overall row
    std::size_t count = 0;
    std::array<std::optional<double>, 3> means;  // relevance, clarity, conciseness; absent when count is 0
};

/// Per-subcategory means followed by the overall Average row. A sample
/// counts towards every subcategory it carries.
std::vector<MeanRow> score_means_by_category(const std::vector<Labels>& labels);

using Histogram = std::array<std::size_t, 10>;  // bin b-1 holds score b

Histogram score_histogram(const std::vector<Labels>& labels, Criterion criterion);

struct DistributionReport {
    std::size_t total = 0;
    std::vector<CategoryShare> categories;
    std::array<Histogram, 3> histograms{};  // relevance, clarity, conciseness
    std::vector<MeanRow> means;
};

DistributionReport describe(const std::vector<Labels>& labels);
DistributionReport describe(const std::vector<judge::JudgedRecord>& judged);

nlohmann::json report_to_json(const DistributionReport& report);

/// Category | Subcategory | Relevance | Clarity | Conciseness, two decimals.
std::string render_means_table(const DistributionReport& report);
std::string render_distribution(const DistributionReport& report);

std::string distribution_csv(const DistributionReport& report);
std::string histogram_csv(const DistributionReport& report);
std::string means_csv(const DistributionReport& report);

/// Writes stats.json, means.txt, distribution.txt and the three CSV series.
void write_outputs(const std::filesystem::path& dir, const DistributionReport& report);

}  // namespace curev::stats
