#include <doctest.h>

#include <cmath>

#include "curev/judge.hpp"
#include "curev/stats.hpp"
#include "support.hpp"

using namespace curev;
using namespace curev::stats;
using curev::testing::fixture_dir;
using curev::testing::golden_dir;
using curev::testing::slurp;
using curev::testing::TempDir;

namespace {

Labels make(LabelSet<IssueType> types, LabelSet<Nature> natures, Civility civility, int r, int c, int k) {
    Labels l;
    l.types = std::move(types);
    l.natures = std::move(natures);
    l.civility = civility;
    l.relevance = r;
    l.clarity = c;
    l.conciseness = k;
    return l;
}

std::vector<judge::JudgedRecord> fixture_judged() {
    judge::MockBackend mock(fixture_dir() / "mock");
    return judge::judge_corpus(corpus::load_corpus(fixture_dir() / "corpus_200.jsonl"), mock, judge::JudgeConfig{})
        .judged;
}

std::vector<Labels> labels_of(const std::vector<judge::JudgedRecord>& judged) {
    std::vector<Labels> out;
    for (const auto& r : judged) out.push_back(r.judgment.labels);
    return out;
}

int score(const Labels& l, Criterion c) {
    switch (c) {
        case Criterion::relevance: return l.relevance;
        case Criterion::clarity: return l.clarity;
        case Criterion::conciseness: return l.conciseness;
    }
    return 0;
}

const MeanRow& row(const std::vector<MeanRow>& rows, std::string_view category, std::string_view sub) {
    for (const auto& r : rows)
        if (r.category == category && r.subcategory == sub) return r;
    FAIL("missing row " << category << "/" << sub);
    return rows.front();
}

// Four samples: Bugfix+Testing/Prescriptive/Civil 8,6,4; Bugfix/Descriptive/Civil 6,9,7;
// Refactoring/Prescriptive+Clarification/Uncivil 3,2,5; Other/Other/Civil 10,10,10.
std::vector<Labels> hand_fixture() {
    using I = IssueType;
    using N = Nature;
    return {
        make({I::bugfix, I::testing}, {N::prescriptive}, Civility::civil, 8, 6, 4),
        make({I::bugfix}, {N::descriptive}, Civility::civil, 6, 9, 7),
        make({I::refactoring}, {N::prescriptive, N::clarification}, Civility::uncivil, 3, 2, 5),
        make({I::other}, {N::other}, Civility::civil, 10, 10, 10),
    };
}

}  // namespace

TEST_CASE("distribution: hand arithmetic on four samples") {
    const auto shares = category_distribution(hand_fixture());
    REQUIRE(shares.size() == 12);
    auto find = [&](std::string_view cat, std::string_view sub) {
        for (const auto& s : shares)
            if (s.category == cat && s.subcategory == sub) return s;
        FAIL("missing " << cat << "/" << sub);
        return shares.front();
    };
    CHECK(find("Type", "Bugfix").count == 2);
    CHECK(std::abs(find("Type", "Bugfix").percentage - 50.0) <= 1e-12);
    CHECK(find("Type", "Logging").count == 0);
    CHECK(std::abs(find("Nature", "Prescriptive").percentage - 50.0) <= 1e-12);
    CHECK(std::abs(find("Civility", "Uncivil").percentage - 25.0) <= 1e-12);
    CHECK(std::abs(find("Civility", "Civil").percentage - 75.0) <= 1e-12);
    CHECK(shares.front().category == "Type");
    CHECK(shares.front().subcategory == "Refactoring");
}

TEST_CASE("means: hand arithmetic on four samples") {
    const auto rows = score_means_by_category(hand_fixture());
    REQUIRE(rows.size() == 13);
    const auto& bugfix = row(rows, "Type", "Bugfix");
    CHECK(bugfix.count == 2);
    CHECK(std::abs(*bugfix.means[0] - 7.0) <= 1e-12);
    CHECK(std::abs(*bugfix.means[1] - 7.5) <= 1e-12);
    CHECK(std::abs(*bugfix.means[2] - 5.5) <= 1e-12);
    const auto& presc = row(rows, "Nature", "Prescriptive");
    CHECK(std::abs(*presc.means[0] - 5.5) <= 1e-12);
    CHECK(std::abs(*presc.means[1] - 4.0) <= 1e-12);
    CHECK(std::abs(*presc.means[2] - 4.5) <= 1e-12);
    const auto& logging = row(rows, "Type", "Logging");
    CHECK(logging.count == 0);
    CHECK_FALSE(logging.means[0].has_value());
    const auto& avg = rows.back();
    CHECK(avg.category == "Average");
    CHECK(avg.subcategory == "--");
    CHECK(avg.count == 4);
    CHECK(std::abs(*avg.means[0] - 6.75) <= 1e-12);
    CHECK(std::abs(*avg.means[1] - 6.75) <= 1e-12);
    CHECK(std::abs(*avg.means[2] - 6.5) <= 1e-12);
}

TEST_CASE("histogram: hand fixture bins") {
    const auto h = score_histogram(hand_fixture(), Criterion::relevance);
    const Histogram expected{0, 0, 1, 0, 0, 1, 0, 1, 0, 1};
    CHECK(h == expected);
}

TEST_CASE("empty corpus is an error") {
    CHECK_THROWS_AS(category_distribution({}), StatsError);
    CHECK_THROWS_AS(describe(std::vector<Labels>{}), StatsError);
}

TEST_CASE("fixture: histograms conserve mass and means match a direct recount") {
    const auto labels = labels_of(fixture_judged());
    const auto report = describe(labels);
    CHECK(report.total == 200);
    for (std::size_t c = 0; c < 3; ++c) {
        std::size_t mass = 0;
        for (auto v : report.histograms[c]) mass += v;
        CHECK(mass == 200);
    }
    for (const auto& r : report.means) {
        CAPTURE(r.category);
        CAPTURE(r.subcategory);
        std::array<double, 3> sum{};
        std::size_t n = 0;
        for (const auto& l : labels) {
            bool member = r.category == "Average";
            if (r.category == "Type")
                for (auto t : l.types.labels()) member = member || label_name(t) == r.subcategory;
            if (r.category == "Nature")
                for (auto t : l.natures.labels()) member = member || label_name(t) == r.subcategory;
            if (r.category == "Civility") member = label_name(l.civility) == r.subcategory;
            if (!member) continue;
            ++n;
            for (std::size_t c = 0; c < 3; ++c) sum[c] += score(l, static_cast<Criterion>(c));
        }
        CHECK(r.count == n);
        for (std::size_t c = 0; c < 3; ++c) {
            if (n == 0) {
                CHECK_FALSE(r.means[c].has_value());
            } else {
                REQUIRE(r.means[c].has_value());
                CHECK(std::abs(*r.means[c] - sum[c] / double(n)) <= 1e-12);
            }
        }
    }
    std::size_t civil = 0;
    for (const auto& s : report.categories)
        if (s.category == "Civility") civil += s.count;
    CHECK(civil == 200);
}

TEST_CASE("fixture: rendered tables match the golden files") {
    const auto report = describe(fixture_judged());
    CHECK(render_means_table(report) == slurp(golden_dir() / "stats_means.txt"));
    CHECK(render_distribution(report) == slurp(golden_dir() / "stats_distribution.txt"));
}

TEST_CASE("write_outputs produces every artifact deterministically") {
    const auto report = describe(fixture_judged());
    TempDir a, b;
    write_outputs(a.path(), report);
    write_outputs(b.path(), report);
    for (const char* name :
         {"stats.json", "means.txt", "distribution.txt", "distribution.csv", "histogram.csv", "means.csv"}) {
        CAPTURE(name);
        REQUIRE(std::filesystem::exists(a.path() / name));
        CHECK(slurp(a.path() / name) == slurp(b.path() / name));
    }
    CHECK(histogram_csv(report).rfind("score,relevance,clarity,conciseness\n", 0) == 0);
    CHECK(report_to_json(report)["total"] == 200);
}
