#include "curev/stats.hpp"

#include <cstdio>

#include "curev/jsonl.hpp"

namespace curev::stats {

using nlohmann::json;

namespace {

constexpr std::array<Criterion, 3> kCriteria{Criterion::relevance, Criterion::clarity, Criterion::conciseness};

struct Sums {
    std::size_t count = 0;
    std::array<std::int64_t, 3> totals{};

    void add(const Labels& l) {
        ++count;
        for (std::size_t i = 0; i < kCriteria.size(); ++i) totals[i] += l.score(kCriteria[i]);
    }
    MeanRow row(std::string category, std::string subcategory) const {
        MeanRow r{std::move(category), std::move(subcategory), count, {}};
        if (count)
            for (std::size_t i = 0; i < 3; ++i)
                r.means[i] = static_cast<double>(totals[i]) / static_cast<double>(count);
        return r;
    }
};

template <class E, class Pred>
void shares(std::vector<CategoryShare>& out, const std::vector<Labels>& labels, Pred has) {
    for (E e : all_labels<E>()) {
        std::size_t n = 0;
        for (const auto& l : labels) n += has(l, e) ? 1 : 0;
        out.push_back({std::string(LabelSpace<E>::category), std::string(label_name(e)), n,
                       100.0 * static_cast<double>(n) / static_cast<double>(labels.size())});
    }
}

template <class E, class Pred>
void mean_rows(std::vector<MeanRow>& out, const std::vector<Labels>& labels, Pred has) {
    for (E e : all_labels<E>()) {
        Sums s;
        for (const auto& l : labels)
            if (has(l, e)) s.add(l);
        out.push_back(s.row(std::string(LabelSpace<E>::category), std::string(label_name(e))));
    }
}

bool has_type(const Labels& l, IssueType t) { return l.types.contains(t); }
bool has_nature(const Labels& l, Nature n) { return l.natures.contains(n); }
bool has_civility(const Labels& l, Civility c) { return l.civility == c; }

std::string fmt(double v, const char* spec = "%.2f") {
    char buf[32];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.resize(width, ' ');
    return s;
}

std::string lpad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::vector<CategoryShare> category_distribution(const std::vector<Labels>& labels) {
    if (labels.empty()) throw StatsError("empty corpus");
    std::vector<CategoryShare> out;
    shares<IssueType>(out, labels, has_type);
    shares<Nature>(out, labels, has_nature);
    shares<Civility>(out, labels, has_civility);
    return out;
}

std::vector<MeanRow> score_means_by_category(const std::vector<Labels>& labels) {
    if (labels.empty()) throw StatsError("empty corpus");
    std::vector<MeanRow> out;
    mean_rows<IssueType>(out, labels, has_type);
    mean_rows<Nature>(out, labels, has_nature);
    mean_rows<Civility>(out, labels, has_civility);
    Sums all;
    for (const auto& l : labels) all.add(l);
    out.push_back(all.row("Average", "--"));
    return out;
}

Histogram score_histogram(const std::vector<Labels>& labels, Criterion criterion) {
    Histogram h{};
    for (const auto& l : labels) {
        const int s = l.score(criterion);
        if (!score_in_range(s)) throw StatsError("score out of range for " + criterion_key(criterion));
        ++h[static_cast<std::size_t>(s - kMinScore)];
    }
    return h;
}

DistributionReport describe(const std::vector<Labels>& labels) {
    DistributionReport r;
    r.total = labels.size();
    r.categories = category_distribution(labels);
    for (std::size_t i = 0; i < kCriteria.size(); ++i) r.histograms[i] = score_histogram(labels, kCriteria[i]);
    r.means = score_means_by_category(labels);
    return r;
}

DistributionReport describe(const std::vector<judge::JudgedRecord>& judged) {
    std::vector<Labels> labels;
    labels.reserve(judged.size());
    for (const auto& j : judged) labels.push_back(j.judgment.labels);
    return describe(labels);
}

json report_to_json(const DistributionReport& r) {
    json categories = json::array();
    for (const auto& c : r.categories)
        categories.push_back({{"category", c.category},
                              {"subcategory", c.subcategory},
                              {"count", c.count},
                              {"percentage", c.percentage}});
    json histograms = json::object();
    for (std::size_t i = 0; i < kCriteria.size(); ++i) histograms[criterion_key(kCriteria[i])] = r.histograms[i];
    json means = json::array();
    for (const auto& m : r.means)
        means.push_back({{"category", m.category},
                         {"subcategory", m.subcategory},
                         {"count", m.count},
                         {"relevance", optional_json(m.means[0])},
                         {"clarity", optional_json(m.means[1])},
                         {"conciseness", optional_json(m.means[2])}});
    return json{{"total", r.total}, {"categories", categories}, {"histograms", histograms}, {"means", means}};
}

std::string render_means_table(const DistributionReport& r) {
    std::string out = pad("Category", 10) + pad("Subcategory", 15) + lpad("Relevance", 10) + lpad("Clarity", 10) +
                      lpad("Conciseness", 13) + "\n";
    std::string last;
    for (const auto& m : r.means) {
        out += pad(m.category == last ? "" : m.category, 10) + pad(m.subcategory, 15);
        last = m.category;
        const std::array<std::size_t, 3> widths{10, 10, 13};
        for (std::size_t i = 0; i < 3; ++i) out += lpad(m.means[i] ? fmt(*m.means[i]) : "--", widths[i]);
        out += "\n";
    }
    return out;
}

std::string render_distribution(const DistributionReport& r) {
    std::string out = "samples " + std::to_string(r.total) + "\n";
    out += pad("Category", 10) + pad("Subcategory", 15) + lpad("Count", 8) + lpad("Percentage", 12) + "\n";
    std::string last;
    for (const auto& c : r.categories) {
        out += pad(c.category == last ? "" : c.category, 10) + pad(c.subcategory, 15) +
               lpad(std::to_string(c.count), 8) + lpad(fmt(c.percentage), 12) + "\n";
        last = c.category;
    }
    out += "\nScore   Relevance   Clarity   Conciseness\n";
    for (std::size_t b = 0; b < 10; ++b)
        out += lpad(std::to_string(b + 1), 5) + lpad(std::to_string(r.histograms[0][b]), 12) +
               lpad(std::to_string(r.histograms[1][b]), 10) + lpad(std::to_string(r.histograms[2][b]), 14) + "\n";
    return out;
}

std::string distribution_csv(const DistributionReport& r) {
    std::string out = "category,subcategory,count,percentage\n";
    for (const auto& c : r.categories)
        out += c.category + "," + c.subcategory + "," + std::to_string(c.count) + "," + fmt(c.percentage, "%.6f") + "\n";
    return out;
}

std::string histogram_csv(const DistributionReport& r) {
    std::string out = "score,relevance,clarity,conciseness\n";
    for (std::size_t b = 0; b < 10; ++b)
        out += std::to_string(b + 1) + "," + std::to_string(r.histograms[0][b]) + "," +
               std::to_string(r.histograms[1][b]) + "," + std::to_string(r.histograms[2][b]) + "\n";
    return out;
}

std::string means_csv(const DistributionReport& r) {
    std::string out = "category,subcategory,count,relevance,clarity,conciseness\n";
    for (const auto& m : r.means) {
        out += m.category + "," + m.subcategory + "," + std::to_string(m.count);
        for (const auto& v : m.means) out += "," + (v ? fmt(*v, "%.6f") : std::string());
        out += "\n";
    }
    return out;
}

void write_outputs(const std::filesystem::path& dir, const DistributionReport& r) {
    jsonl::write_text(dir / "stats.json", report_to_json(r).dump(2) + "\n");
    jsonl::write_text(dir / "means.txt", render_means_table(r));
    jsonl::write_text(dir / "distribution.txt", render_distribution(r));
    jsonl::write_text(dir / "distribution.csv", distribution_csv(r));
    jsonl::write_text(dir / "histogram.csv", histogram_csv(r));
    jsonl::write_text(dir / "means.csv", means_csv(r));
}

}  // namespace curev::stats
