#include <doctest.h>

#include <set>

#include "curev/curation.hpp"
#include "curev/jsonl.hpp"
#include "curev/label_json.hpp"
#include "curev/parse.hpp"
#include "curev/reference.hpp"
#include "support.hpp"

using namespace curev;
using namespace curev::curation;
using curev::testing::fixture_dir;
using curev::testing::golden_dir;
using curev::testing::slurp;
using curev::testing::TempDir;

namespace {

const std::string kListDeleteReformulated =
    "Consider using `list_delete` instead of `list_free` to properly clean up the `nh_list` in "
    "`ospf6_route_delete`. The `list_free` function does not handle the deletion of the list's "
    "elements, which is necessary in this case.";

corpus::ReviewSample sample(std::string id) {
    corpus::ReviewSample s;
    s.id = std::move(id);
    s.diff = "@@ -1,1 +1,1 @@\n-a\n+b\n";
    s.comment = "comment " + s.id;
    return s;
}

Judgment judgment(int relevance, int clarity = 5, int conciseness = 5) {
    Judgment j;
    j.reference_comment = "ref";
    j.rationale = "why";
    j.labels.types = {IssueType::refactoring};
    j.labels.natures = {Nature::prescriptive};
    j.labels.relevance = relevance;
    j.labels.clarity = clarity;
    j.labels.conciseness = conciseness;
    return j;
}

std::vector<judge::JudgedRecord> fixture_judged() {
    judge::MockBackend mock(fixture_dir() / "mock");
    return judge::judge_corpus(corpus::load_corpus(fixture_dir() / "corpus_200.jsonl"), mock, judge::JudgeConfig{})
        .judged;
}

std::vector<std::string> hand_enumerated_removed() {
    std::vector<std::string> ids;
    for (const auto& l : jsonl::read_lines(fixture_dir() / "irrelevant_ids.txt")) ids.push_back(l.text);
    return ids;
}

const EvolutionRow& row(const CurationReport& r, std::string_view cat, std::string_view sub) {
    for (const auto& e : r.evolution)
        if (e.category == cat && e.subcategory == sub) return e;
    FAIL("missing row " << cat << "/" << sub);
    return r.evolution.front();
}

const ProportionRow& prow(const std::vector<ProportionRow>& rows, std::string_view sub) {
    for (const auto& p : rows)
        if (p.subcategory == sub) return p;
    FAIL("missing proportion row " << sub);
    return rows.front();
}

/// Mock backend that fails selected (id, kind) calls.
class FaultyBackend : public judge::Backend {
public:
    FaultyBackend(std::set<std::string> unreachable_reformulation, std::set<std::string> garbage_reevaluation)
        : mock_(fixture_dir() / "mock"),
          unreachable_(std::move(unreachable_reformulation)),
          garbage_(std::move(garbage_reevaluation)) {}
    std::string send(const judge::JudgePrompt& p, const judge::JudgeConfig& c) override {
        if (p.kind == judge::PromptKind::reformulation && unreachable_.count(p.sample_id))
            throw judge::TransportError("HTTP 400", false, false, 400);
        if (p.kind == judge::PromptKind::reevaluation && garbage_.count(p.sample_id)) return "no block";
        return mock_.send(p, c);
    }

private:
    judge::MockBackend mock_;
    std::set<std::string> unreachable_;
    std::set<std::string> garbage_;
};

}  // namespace

TEST_CASE("filter: strict threshold") {
    const corpus::Corpus c({sample("a"), sample("b")});
    JudgmentIndex idx{{"a", judgment(3)}, {"b", judgment(4)}};
    const auto r = filter_irrelevant(c, idx, 4);
    CHECK(r.kept.ids() == std::vector<std::string>{"b"});
    CHECK(r.removed == std::vector<std::string>{"a"});
}

TEST_CASE("filter: missing judgment and bad threshold") {
    const corpus::Corpus c({sample("a"), sample("b")});
    JudgmentIndex idx{{"a", judgment(5)}};
    try {
        filter_irrelevant(c, idx);
        FAIL("expected MissingJudgment");
    } catch (const MissingJudgment& e) {
        CHECK(e.id() == "b");
    }
    idx["b"] = judgment(5);
    CHECK_THROWS_AS(filter_irrelevant(c, idx, 0), CurationError);
    CHECK_THROWS_AS(filter_irrelevant(c, idx, 11), CurationError);
}

TEST_CASE("filter: full-scale bookkeeping") {
    std::vector<corpus::ReviewSample> v;
    JudgmentIndex idx;
    for (std::size_t i = 0; i < reference::kDatasetSize; ++i) {
        v.push_back(sample(corpus::ordinal_id(i)));
        // Every 29th sample, until the published count is reached, scores below the threshold.
        const bool low = i % 29 == 0 && i / 29 < reference::kBelowThreshold;
        idx.emplace(corpus::ordinal_id(i), judgment(low ? 1 + static_cast<int>(i % 3) : 4 + static_cast<int>(i % 7)));
    }
    const auto r = filter_irrelevant(corpus::Corpus(std::move(v)), idx, reference::kRelevanceThreshold);
    CHECK(r.removed.size() == reference::kBelowThreshold);
    CHECK(r.kept.size() == reference::kCuratedSize);
}

TEST_CASE("filter: fixture removes exactly the hand-enumerated ids") {
    const auto corpus = corpus::load_corpus(fixture_dir() / "corpus_200.jsonl");
    const auto idx = index_judgments(fixture_judged());
    const auto r = filter_irrelevant(corpus, idx);
    CHECK(r.removed == hand_enumerated_removed());
    CHECK(r.kept.size() == 189);
    CHECK(r.kept.size() + r.removed.size() == corpus.size());
    const auto again = filter_irrelevant(r.kept, idx);
    CHECK(again.removed.empty());
    CHECK(again.kept.samples() == r.kept.samples());
}

TEST_CASE("curate: mock fixture end to end") {
    const auto corpus = corpus::load_corpus(fixture_dir() / "corpus_200.jsonl");
    const auto judged = fixture_judged();
    const auto idx = index_judgments(judged);
    const auto filtered = filter_irrelevant(corpus, idx);
    judge::MockBackend mock(fixture_dir() / "mock");
    judge::JudgeConfig cfg;
    cfg.max_parallel = 4;
    const auto run = curate(filtered.kept, idx, mock, cfg);
    REQUIRE(run.curated.size() == 189);
    CHECK(run.quarantined.empty());

    const auto& first = run.curated.front();
    CHECK(first.id == "000000");
    CHECK(first.comment_original.rfind("you need to use `list_delete` here", 0) == 0);
    CHECK(first.reformulated_comment == kListDeleteReformulated);

    std::set<std::string> ids;
    for (const auto& c : run.curated) {
        CHECK(c.carried_relevance == idx.at(c.id).labels.relevance);
        CHECK(c.carried_relevance >= kDefaultRelevanceThreshold);
        CHECK(ids.insert(c.id).second);
    }
    const auto kept_ids = filtered.kept.ids();
    CHECK(ids == std::set<std::string>(kept_ids.begin(), kept_ids.end()));

    const auto report = make_report(judged, run.curated, filtered.removed, run.quarantined.size());
    CHECK(report.total_in == 200);
    CHECK(report.kept == 189);
    CHECK(prow(report.civility, "Civil").after_pct == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(prow(report.civility, "Uncivil").after_count == 0);
}

TEST_CASE("curate: failures are quarantined with their stage") {
    const auto corpus = corpus::load_corpus(fixture_dir() / "corpus_200.jsonl");
    const auto judged = fixture_judged();
    const auto idx = index_judgments(judged);
    const auto filtered = filter_irrelevant(corpus, idx);
    FaultyBackend backend({"000005"}, {"000007", "000009"});
    judge::JudgeConfig cfg;
    cfg.initial_backoff = std::chrono::milliseconds(0);
    const auto run = curate(filtered.kept, idx, backend, cfg);
    REQUIRE(run.quarantined.size() == 3);
    CHECK(run.quarantined[0].id == "000005");
    CHECK(run.quarantined[0].stage == "reformulation");
    CHECK(run.quarantined[1].id == "000007");
    CHECK(run.quarantined[1].stage == "reevaluation");
    CHECK(run.curated.size() + filtered.removed.size() + run.quarantined.size() == corpus.size());
    const auto report = make_report(judged, run.curated, filtered.removed, run.quarantined.size());
    CHECK(report.kept == report.curated + report.quarantined);
    CHECK(report.total_in == report.removed_ids.size() + report.kept);
}

TEST_CASE("curate: empty kept corpus") {
    judge::MockBackend mock(fixture_dir() / "mock");
    const auto run = curate(corpus::Corpus{}, JudgmentIndex{}, mock, judge::JudgeConfig{});
    CHECK(run.curated.empty());
    CHECK(run.quarantined.empty());
    const auto report = make_report({}, run.curated, {}, 0);
    CHECK(report.kept == 0);
    CHECK(report.total_in == 0);
}

TEST_CASE("curated records: schema and round trip") {
    CuratedSample s;
    s.id = "000000";
    s.comment_original = "old";
    s.reformulated_comment = "new";
    s.carried_relevance = 7;
    s.post_judgment.natures = {Nature::prescriptive};
    s.post_judgment.clarity = 9;
    s.post_judgment.conciseness = 8;
    const auto j = curated_to_json(s);
    std::set<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.insert(k);
    CHECK(keys == std::set<std::string>{"id", "comment_original", "comment_curated", "carried_relevance",
                                        "post_judgment"});
    CHECK_FALSE(j["post_judgment"].contains("relevance"));
    CHECK(curated_from_json(j) == s);

    auto bad = j;
    bad["post_judgment"]["relevance"] = 5;
    CHECK_THROWS(curated_from_json(bad));

    TempDir tmp;
    save_curated(tmp / "c.jsonl", {s});
    CHECK(load_curated(tmp / "c.jsonl") == std::vector<CuratedSample>{s});
}

TEST_CASE("evolution: identical scores give zero deltas") {
    std::vector<judge::JudgedRecord> original;
    std::vector<CuratedSample> curated;
    for (int i = 0; i < 6; ++i) {
        auto j = judgment(6, 3 + i, 9 - i);
        j.labels.types = {static_cast<IssueType>(i)};
        original.push_back({corpus::ordinal_id(i), j});
        CuratedSample c;
        c.id = corpus::ordinal_id(i);
        c.carried_relevance = 6;
        c.post_judgment.natures = j.labels.natures;
        c.post_judgment.civility = j.labels.civility;
        c.post_judgment.clarity = j.labels.clarity;
        c.post_judgment.conciseness = j.labels.conciseness;
        curated.push_back(c);
    }
    const auto r = evolution_report(original, curated);
    for (const auto& e : r.evolution) {
        if (e.clarity.delta()) CHECK(*e.clarity.delta() == 0.0);
        if (e.conciseness.delta()) CHECK(*e.conciseness.delta() == 0.0);
    }
    CHECK(r.evolution.back().category == "Average");
    CHECK(*r.evolution.back().clarity.delta() == 0.0);
}

TEST_CASE("evolution: five-sample hand arithmetic") {
    auto make = [](std::initializer_list<IssueType> t, std::initializer_list<Nature> n, Civility c, int rel,
                   int clar, int conc) {
        Judgment j;
        j.reference_comment = "r";
        j.rationale = "w";
        j.labels.types = t;
        j.labels.natures = n;
        j.labels.civility = c;
        j.labels.relevance = rel;
        j.labels.clarity = clar;
        j.labels.conciseness = conc;
        return j;
    };
    using I = IssueType;
    using N = Nature;
    const std::vector<judge::JudgedRecord> original = {
        {"s1", make({I::refactoring}, {N::prescriptive}, Civility::civil, 8, 6, 7)},
        {"s2", make({I::refactoring, I::bugfix}, {N::descriptive}, Civility::uncivil, 5, 4, 5)},
        {"s3", make({I::bugfix}, {N::prescriptive, N::clarification}, Civility::civil, 9, 7, 8)},
        {"s4", make({I::testing}, {N::other}, Civility::civil, 3, 3, 9)},
        {"s5", make({I::refactoring}, {N::prescriptive}, Civility::civil, 6, 9, 4)},
    };
    auto post = [](std::string id, std::initializer_list<N> n, int clar, int conc) {
        CuratedSample c;
        c.id = std::move(id);
        c.post_judgment.natures = n;
        c.post_judgment.civility = Civility::civil;
        c.post_judgment.clarity = clar;
        c.post_judgment.conciseness = conc;
        return c;
    };
    const std::vector<CuratedSample> curated = {
        post("s1", {N::prescriptive}, 8, 8),
        post("s2", {N::prescriptive}, 7, 6),
        post("s3", {N::clarification}, 9, 7),
        post("s5", {N::descriptive}, 9, 5),
    };
    const auto r = make_report(original, curated, {"s4"}, 0);
    constexpr double eps = 1e-12;

    const auto& refac = row(r, "Type", "Refactoring");
    CHECK(std::abs(*refac.clarity.before - 19.0 / 3.0) < eps);
    CHECK(std::abs(*refac.clarity.after - 8.0) < eps);
    CHECK(std::abs(*refac.clarity.delta() - 5.0 / 3.0) < eps);
    CHECK(std::abs(*refac.conciseness.before - 16.0 / 3.0) < eps);
    CHECK(std::abs(*refac.conciseness.after - 19.0 / 3.0) < eps);

    const auto& bugfix = row(r, "Type", "Bugfix");
    CHECK(std::abs(*bugfix.clarity.before - 5.5) < eps);
    CHECK(std::abs(*bugfix.clarity.after - 8.0) < eps);
    CHECK(std::abs(*bugfix.conciseness.before - 6.5) < eps);
    CHECK(std::abs(*bugfix.conciseness.after - 6.5) < eps);

    const auto& testing = row(r, "Type", "Testing");
    CHECK(std::abs(*testing.clarity.before - 3.0) < eps);
    CHECK_FALSE(testing.clarity.after.has_value());
    CHECK_FALSE(row(r, "Type", "Logging").clarity.before.has_value());

    const auto& presc = row(r, "Nature", "Prescriptive");
    CHECK(std::abs(*presc.clarity.before - 22.0 / 3.0) < eps);
    CHECK(std::abs(*presc.clarity.after - 7.5) < eps);
    CHECK(std::abs(*presc.conciseness.before - 19.0 / 3.0) < eps);
    CHECK(std::abs(*presc.conciseness.after - 7.0) < eps);
    CHECK(std::abs(*row(r, "Nature", "Descriptive").clarity.after - 9.0) < eps);
    CHECK_FALSE(row(r, "Nature", "Other").clarity.after.has_value());

    const auto& civil = row(r, "Civility", "Civil");
    CHECK(std::abs(*civil.clarity.before - 25.0 / 4.0) < eps);
    CHECK(std::abs(*civil.clarity.after - 33.0 / 4.0) < eps);
    CHECK(std::abs(*civil.conciseness.before - 7.0) < eps);
    CHECK(std::abs(*civil.conciseness.after - 6.5) < eps);
    CHECK_FALSE(row(r, "Civility", "Uncivil").clarity.after.has_value());

    const auto& avg = row(r, "Average", "--");
    CHECK(std::abs(*avg.clarity.before - 5.8) < eps);
    CHECK(std::abs(*avg.clarity.after - 8.25) < eps);
    CHECK(std::abs(*avg.conciseness.before - 6.6) < eps);
    CHECK(std::abs(*avg.conciseness.after - 6.5) < eps);

    CHECK(prow(r.nature, "Prescriptive").before_count == 3);
    CHECK(std::abs(prow(r.nature, "Prescriptive").before_pct - 60.0) < eps);
    CHECK(prow(r.nature, "Prescriptive").after_count == 2);
    CHECK(std::abs(prow(r.nature, "Prescriptive").after_pct - 50.0) < eps);
    CHECK(prow(r.nature, "Other").after_count == 0);

    REQUIRE(r.civility_populations.size() == 3);
    CHECK(r.civility_populations[0].total == 5);
    CHECK(r.civility_populations[0].uncivil == 1);
    CHECK(r.civility_populations[1].total == 4);
    CHECK(r.civility_populations[1].civil == 3);
    CHECK(r.civility_populations[2].total == 4);
    CHECK(r.civility_populations[2].civil == 4);
}

TEST_CASE("evolution: curated id without an original judgment") {
    CuratedSample c;
    c.id = "ghost";
    c.post_judgment.natures = {Nature::other};
    CHECK_THROWS_AS(evolution_report({}, {c}), CurationError);
}

TEST_CASE("report layout matches the golden evolution table") {
    const auto corpus = corpus::load_corpus(fixture_dir() / "corpus_200.jsonl");
    const auto judged = fixture_judged();
    const auto idx = index_judgments(judged);
    const auto filtered = filter_irrelevant(corpus, idx);
    judge::MockBackend mock(fixture_dir() / "mock");
    const auto run = curate(filtered.kept, idx, mock, judge::JudgeConfig{});
    const auto report = make_report(judged, run.curated, filtered.removed, run.quarantined.size());
    CHECK(render_report(report) == slurp(golden_dir() / "curation_report.txt"));
    const auto j = report_to_json(report);
    CHECK(j["total_in"] == 200);
    CHECK(j["kept"] == 189);
}
