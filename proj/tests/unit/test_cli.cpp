#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "curev/cli.hpp"
#include "support.hpp"

using curev::testing::fixture_dir;
using curev::testing::golden_dir;
using curev::testing::slurp;
using curev::testing::spit;
using curev::testing::TempDir;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "curev");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = curev::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string s(const fs::path& p) { return p.string(); }

void pipeline(const fs::path& d) {
    const auto fx = fixture_dir();
    REQUIRE(run({"import", "--in", s(fx / "corpus_200.jsonl"), "--out", s(d / "corpus.jsonl")}).code == 0);
    REQUIRE(run({"judge", "--backend", "mock", "--fixtures", s(fx / "mock"), "--in", s(d / "corpus.jsonl"),
                 "--out", s(d / "judged.jsonl")})
                .code == 0);
    REQUIRE(run({"filter", "--corpus", s(d / "corpus.jsonl"), "--judged", s(d / "judged.jsonl"), "--out",
                 s(d / "kept.jsonl")})
                .code == 0);
    REQUIRE(run({"curate", "--backend", "mock", "--fixtures", s(fx / "mock"), "--kept", s(d / "kept.jsonl"),
                 "--judged", s(d / "judged.jsonl"), "--removed", s(d / "kept.removed.txt"), "--out",
                 s(d / "curated.jsonl")})
                .code == 0);
    REQUIRE(run({"stats", "--judged", s(d / "judged.jsonl"), "--out-dir", s(d / "stats")}).code == 0);
    REQUIRE(run({"export-tasks", "--corpus", s(d / "corpus.jsonl"), "--curated", s(d / "curated.jsonl"), "--out",
                 s(d / "tasks")})
                .code == 0);
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
    return out;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == curev::cli::kExitUsage);
    CHECK(run({"frobnicate"}).code == curev::cli::kExitUsage);
    CHECK(run({"filter", "--threshold", "0"}).code == curev::cli::kExitUsage);
    CHECK(run({"eval", "--cand", "/nonexistent"}).code == curev::cli::kExitUsage);
    CHECK(run({"--help"}).code == curev::cli::kExitOk);
}

TEST_CASE("runtime failures exit 1 with a JSON summary") {
    TempDir d;
    const auto r = run({"filter", "--corpus", s(d.path() / "missing.jsonl"), "--judged", s(d.path() / "j.jsonl"),
                        "--out", s(d.path() / "kept.jsonl")});
    CHECK(r.code == curev::cli::kExitFailure);
    const auto j = json::parse(r.err.substr(r.err.rfind('{')));
    CHECK(j["command"] == "filter");
    CHECK(j.contains("stage"));
    CHECK(j.contains("error"));
}

TEST_CASE("import reports accepted and rejected counts") {
    TempDir d;
    const auto r = run({"import", "--in", s(fixture_dir() / "import_200_raw.jsonl"), "--out", s(d.path() / "c.jsonl")});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["imported"] == 193);
    CHECK(j["rejected"] == 7);
    CHECK(fs::exists(d.path() / "c.rejects.jsonl"));
}

TEST_CASE("eval prints the requested metric") {
    const auto ref = s(fixture_dir() / "em" / "ref.jsonl");
    const auto cand = s(fixture_dir() / "em" / "cand.jsonl");
    CHECK(run({"eval", "--cand", ref, "--ref", ref, "--metric", "bleu"}).out == "1.0000\n");
    CHECK(run({"eval", "--cand", cand, "--ref", ref, "--metric", "em"}).out == "7/20\n");
    CHECK(run({"eval", "--cand", cand, "--ref", ref, "--metric", "em", "--raw"}).out == "5/20\n");
    const auto serial = run({"eval", "--cand", cand, "--ref", ref, "--metric", "all", "--language", "c", "--serial"});
    const auto parallel = run({"eval", "--cand", cand, "--ref", ref, "--metric", "all", "--language", "c"});
    CHECK(serial.code == 0);
    CHECK(serial.out == parallel.out);
}

TEST_CASE("prompt command matches the golden prompts") {
    const auto corpus = s(fixture_dir() / "corpus_200.jsonl");
    CHECK(run({"prompt", "--corpus", corpus, "--id", "000000", "--kind", "evaluation"}).out ==
          slurp(golden_dir() / "prompt_000000.evaluation.txt"));
    CHECK(run({"prompt", "--corpus", corpus, "--id", "000001", "--kind", "reformulation"}).out ==
          slurp(golden_dir() / "prompt_000001.reformulation.txt"));
}

TEST_CASE("filter removes exactly the irrelevant ids") {
    TempDir d;
    pipeline(d.path());
    std::istringstream expected_in(slurp(fixture_dir() / "irrelevant_ids.txt"));
    std::vector<std::string> expected;
    for (std::string id; expected_in >> id;) expected.push_back(id);
    std::istringstream removed_in(slurp(d.path() / "kept.removed.txt"));
    std::vector<std::string> removed;
    for (std::string id; removed_in >> id;) removed.push_back(id);
    CHECK(removed == expected);
}

TEST_CASE("pipeline output is byte-identical across runs") {
    TempDir a, b;
    pipeline(a.path());
    pipeline(b.path());
    const auto ta = tree(a.path());
    const auto tb = tree(b.path());
    CHECK(ta.size() > 15);
    REQUIRE(ta.size() == tb.size());
    for (const auto& [name, bytes] : ta) {
        CAPTURE(name);
        REQUIRE(tb.count(name));
        CHECK(bytes == tb.at(name));
    }
}

TEST_CASE("config supplies defaults that flags override") {
    TempDir d;
    spit(d.path() / "curev.json", json{{"filter", {{"threshold", 10}}}}.dump());
    const auto fx = fixture_dir();
    REQUIRE(run({"import", "--in", s(fx / "corpus_200.jsonl"), "--out", s(d.path() / "corpus.jsonl")}).code == 0);
    REQUIRE(run({"judge", "--fixtures", s(fx / "mock"), "--in", s(d.path() / "corpus.jsonl"), "--out",
                 s(d.path() / "judged.jsonl")})
                .code == 0);
    const auto strict = run({"--config", s(d.path() / "curev.json"), "filter", "--corpus", s(d.path() / "corpus.jsonl"),
                             "--judged", s(d.path() / "judged.jsonl"), "--out", s(d.path() / "k1.jsonl")});
    const auto flag = run({"--config", s(d.path() / "curev.json"), "filter", "--threshold", "4", "--corpus",
                           s(d.path() / "corpus.jsonl"), "--judged", s(d.path() / "judged.jsonl"), "--out",
                           s(d.path() / "k2.jsonl")});
    REQUIRE(strict.code == 0);
    REQUIRE(flag.code == 0);
    CHECK(json::parse(strict.out)["kept"] < 189);
    CHECK(json::parse(flag.out)["kept"] == 189);
}
