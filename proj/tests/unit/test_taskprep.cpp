#include <doctest.h>

#include <set>

#include "curev/jsonl.hpp"
#include "curev/taskprep.hpp"
#include "support.hpp"

using namespace curev;
using namespace curev::taskprep;
using curev::testing::fixture_dir;
using curev::testing::slurp;
using curev::testing::TempDir;
using nlohmann::json;

namespace {

std::vector<corpus::PairedSample> fixture_pairs() {
    const auto original = corpus::load_corpus(fixture_dir() / "corpus_200.jsonl");
    std::vector<corpus::CuratedComment> curated;
    for (const auto& s : original) curated.push_back({s.id, "Consider this instead: " + s.comment});
    return corpus::pair_subsets(original, curated, original.size(), 7);
}

std::vector<json> read_split(const std::filesystem::path& dir, Task task, Variant variant, const char* file) {
    return jsonl::read(dir / std::string(task_name(task)) / std::string(variant_name(variant)) / file);
}

std::vector<std::string> ids(const std::vector<json>& records) {
    std::vector<std::string> out;
    for (const auto& r : records) out.push_back(r["id"]);
    return out;
}

}  // namespace

TEST_CASE("fnv1a64 reference vectors") {
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("task names round trip") {
    for (auto t : {Task::comment_generation, Task::code_refinement}) CHECK(parse_task(task_name(t)) == t);
    CHECK_FALSE(parse_task("translation").has_value());
}

TEST_CASE("variants share ids and differ only in the comment") {
    const auto pairs = fixture_pairs();
    TempDir dir;
    for (auto task : {Task::comment_generation, Task::code_refinement}) {
        CAPTURE(task_name(task));
        const auto result = export_task(pairs, task, dir.path(), ExportOptions{});
        REQUIRE(result.variants.size() == 2);
        for (const char* file : {"train.jsonl", "eval.jsonl"}) {
            const auto orig = read_split(dir.path(), task, Variant::original, file);
            const auto cur = read_split(dir.path(), task, Variant::curated, file);
            CHECK(ids(orig) == ids(cur));
            REQUIRE(orig.size() == cur.size());
            for (std::size_t i = 0; i < orig.size(); ++i) {
                auto a = orig[i], b = cur[i];
                CHECK(a["comment"] != b["comment"]);
                a.erase("comment");
                b.erase("comment");
                CHECK(a == b);
            }
        }
        const auto& o = result.variants[0];
        const auto& c = result.variants[1];
        CHECK(o.train_count == c.train_count);
        CHECK(o.eval_count == c.eval_count);
        CHECK(o.train_hash != c.train_hash);
    }
}

TEST_CASE("train and eval partition the eligible ids at the configured fraction") {
    const auto pairs = fixture_pairs();
    TempDir dir;
    const auto result = export_task(pairs, Task::comment_generation, dir.path(), ExportOptions{});
    CHECK(result.skipped.empty());
    const auto train = ids(read_split(dir.path(), Task::comment_generation, Variant::original, "train.jsonl"));
    const auto eval = ids(read_split(dir.path(), Task::comment_generation, Variant::original, "eval.jsonl"));
    CHECK(train.size() == 150);
    CHECK(eval.size() == 50);
    std::set<std::string> all(train.begin(), train.end());
    all.insert(eval.begin(), eval.end());
    CHECK(all.size() == 200);
}

TEST_CASE("re-export under a fixed seed is hash-identical") {
    const auto pairs = fixture_pairs();
    TempDir a, b, c;
    const auto first = export_task(pairs, Task::code_refinement, a.path(), ExportOptions{});
    const auto second = export_task(pairs, Task::code_refinement, b.path(), ExportOptions{});
    for (std::size_t v = 0; v < 2; ++v) {
        CHECK(first.variants[v].train_hash == second.variants[v].train_hash);
        CHECK(first.variants[v].eval_hash == second.variants[v].eval_hash);
        CHECK(first.variants[v].manifest_hash == second.variants[v].manifest_hash);
        for (const char* f : {"train.jsonl", "eval.jsonl", "manifest.json", "prompt_template.txt"}) {
            const auto rel = std::filesystem::path("code_refinement") / std::string(variant_name(first.variants[v].variant)) / f;
            CHECK(slurp(a.path() / rel) == slurp(b.path() / rel));
        }
        CHECK(fnv1a64_hex(slurp(first.variants[v].directory / "train.jsonl")) == first.variants[v].train_hash);
    }
    ExportOptions other;
    other.seed = 43;
    const auto third = export_task(pairs, Task::code_refinement, c.path(), other);
    CHECK(third.variants[0].train_hash != first.variants[0].train_hash);
}

TEST_CASE("refinement skips samples without old_file or target") {
    const auto pairs = fixture_pairs();
    const auto skips = ineligible(pairs, Task::code_refinement);
    std::map<std::string, std::string> got;
    for (const auto& s : skips) got[s.id] = s.reason;
    const std::map<std::string, std::string> expected = {
        {"000019", "missing old_file"}, {"000064", "missing old_file"}, {"000102", "missing target"},
        {"000133", "missing old_file"}, {"000177", "missing target"},
    };
    CHECK(got == expected);
    CHECK(ineligible(pairs, Task::comment_generation).empty());

    TempDir dir;
    const auto result = export_task(pairs, Task::code_refinement, dir.path(), ExportOptions{});
    CHECK(result.skipped.size() == 5);
    CHECK(result.variants[0].train_count + result.variants[0].eval_count == 195);
    const auto manifest =
        json::parse(slurp(dir.path() / "code_refinement" / "curated" / "manifest.json"));
    CHECK(manifest["counts"]["skipped"] == 5);
    CHECK(manifest["counts"]["eligible"] == 195);
    CHECK(manifest["training"]["lora_r"] == 16);
    CHECK(manifest["training"]["lora_alpha"] == 32);

    for (const auto& p : pairs)
        if (p.sample.id == "000064") CHECK_THROWS_AS(task_record(p, Task::code_refinement, Variant::original), TaskError);
}

TEST_CASE("record fields per task") {
    const auto pairs = fixture_pairs();
    const auto& p = pairs.front();
    const auto gen = task_record(p, Task::comment_generation, Variant::curated);
    CHECK(gen["comment"] == p.curated_comment);
    CHECK_FALSE(gen.contains("target"));
    const auto ref = task_record(p, Task::code_refinement, Variant::original);
    CHECK(ref["comment"] == p.sample.comment);
    CHECK(ref["target"] == *p.sample.target_diff);
    CHECK(ref["old_file"] == p.sample.old_file);
}

TEST_CASE("duplicate pair ids are rejected") {
    auto pairs = fixture_pairs();
    pairs.push_back(pairs.front());
    TempDir dir;
    CHECK_THROWS_AS(export_task(pairs, Task::comment_generation, dir.path(), ExportOptions{}), TaskError);
}
