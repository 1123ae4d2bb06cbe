#include "curev/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_map>

#include "curev/diff.hpp"
#include "curev/jsonl.hpp"
#include "curev/labels.hpp"
#include "curev/random.hpp"

namespace curev::corpus {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kLanguageCount> kLanguageNames{
    "php", "ruby", "csharp", "c", "java", "python", "cpp", "go", "javascript"};

struct Alias {
    std::string_view text;
    Language lang;
};

constexpr std::array<Alias, 9> kAliases{{{"rb", Language::ruby},
                                         {"cs", Language::csharp},
                                         {"c#", Language::csharp},
                                         {"py", Language::python},
                                         {"c++", Language::cpp},
                                         {"cc", Language::cpp},
                                         {"golang", Language::go},
                                         {"js", Language::javascript},
                                         {"java_script", Language::javascript}}};

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

// Returns the reason a record cannot become a sample, or nullopt on success.
std::optional<std::string> build_sample(const json& record, const FieldMapping& m, ReviewSample& out) {
    if (!record.is_object()) return "record is not a JSON object";

    auto text_field = [&](const std::string& key, std::string& dest,
                          bool required) -> std::optional<std::string> {
        auto it = record.find(key);
        if (it == record.end() || it->is_null()) {
            if (required) return "missing field: " + key;
            return std::nullopt;
        }
        if (!it->is_string()) return "field is not a string: " + key;
        dest = it->get<std::string>();
        return std::nullopt;
    };

    if (auto err = text_field(m.comment, out.comment, true)) return err;
    if (blank(out.comment)) return "empty comment";
    if (auto err = text_field(m.diff, out.diff, true)) return err;
    if (blank(out.diff)) return "empty diff";

    std::string lang;
    if (auto err = text_field(m.language, lang, true)) return err;
    auto parsed = parse_language(lang);
    if (!parsed) return "unknown language";
    out.language = *parsed;

    if (auto err = text_field(m.old_file, out.old_file, false)) return err;

    std::string target;
    if (auto it = record.find(m.target_diff); it != record.end() && !it->is_null()) {
        if (auto err = text_field(m.target_diff, target, false)) return err;
        if (!blank(target)) out.target_diff = std::move(target);
    }

    if (auto it = record.find(m.meta); it != record.end() && !it->is_null()) {
        if (!it->is_object()) return "field is not an object: " + m.meta;
        for (const auto& [k, v] : it->items())
            out.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }

    try {
        parse_unified_diff(out.diff);
    } catch (const DiffError& e) {
        return std::string("malformed diff: ") + e.what();
    }
    return std::nullopt;
}

}  // namespace

std::string_view language_name(Language lang) { return kLanguageNames[static_cast<std::size_t>(lang)]; }

std::optional<Language> parse_language(std::string_view text) {
    for (std::size_t i = 0; i < kLanguageNames.size(); ++i)
        if (iequals(text, kLanguageNames[i])) return static_cast<Language>(i);
    for (const auto& a : kAliases)
        if (iequals(text, a.text)) return a.lang;
    return std::nullopt;
}

Corpus::Corpus(std::vector<ReviewSample> samples, Provenance provenance)
    : samples_(std::move(samples)), provenance_(std::move(provenance)) {
    std::sort(samples_.begin(), samples_.end(),
              [](const ReviewSample& a, const ReviewSample& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < samples_.size(); ++i)
        if (samples_[i].id == samples_[i - 1].id) throw CorpusError("duplicate id " + samples_[i].id);
}

const ReviewSample* Corpus::find(std::string_view id) const {
    auto it = std::lower_bound(samples_.begin(), samples_.end(), id,
                               [](const ReviewSample& s, std::string_view key) { return s.id < key; });
    if (it == samples_.end() || it->id != id) return nullptr;
    return &*it;
}

std::vector<std::string> Corpus::ids() const {
    std::vector<std::string> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_) out.push_back(s.id);
    return out;
}

FieldMapping FieldMapping::from_json(const json& j) {
    FieldMapping m;
    auto take = [&](const char* key, std::string& dest) {
        if (auto it = j.find(key); it != j.end()) dest = it->get<std::string>();
    };
    take("id", m.id);
    take("language", m.language);
    take("old_file", m.old_file);
    take("diff", m.diff);
    take("comment", m.comment);
    take("target_diff", m.target_diff);
    take("meta", m.meta);
    return m;
}

std::string ordinal_id(std::size_t ordinal) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu", ordinal);
    return buf;
}

ImportResult import_samples(std::istream& source, const FieldMapping& mapping, std::string source_name) {
    const auto lines = jsonl::read_lines(source);

    std::vector<ReviewSample> samples;
    std::vector<Reject> rejects;
    std::set<std::string> seen;

    for (std::size_t ordinal = 0; ordinal < lines.size(); ++ordinal) {
        const auto& line = lines[ordinal];
        std::string id = ordinal_id(ordinal);

        json record;
        try {
            record = json::parse(line.text);
        } catch (const json::parse_error&) {
            rejects.push_back({id, "invalid json", line.line_number});
            continue;
        }
        if (record.is_object()) {
            if (auto it = record.find(mapping.id); it != record.end() && !it->is_null()) {
                if (it->is_string() && !blank(it->get<std::string>())) {
                    id = it->get<std::string>();
                } else if (it->is_number_integer()) {
                    id = std::to_string(it->get<long long>());
                } else {
                    rejects.push_back({id, "invalid id", line.line_number});
                    continue;
                }
            }
        }

        ReviewSample sample;
        if (auto reason = build_sample(record, mapping, sample)) {
            rejects.push_back({id, *reason, line.line_number});
            continue;
        }
        if (!seen.insert(id).second) {
            rejects.push_back({id, "duplicate id", line.line_number});
            continue;
        }
        sample.id = std::move(id);
        samples.push_back(std::move(sample));
    }

    return {Corpus(std::move(samples), {std::move(source_name), std::chrono::system_clock::now()}),
            std::move(rejects)};
}

ImportResult import_samples(const std::filesystem::path& source, const FieldMapping& mapping) {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw IoError("cannot open " + source.string());
    return import_samples(in, mapping, source.string());
}

json sample_to_json(const ReviewSample& s) {
    json j{{"id", s.id},
           {"lang", std::string(language_name(s.language))},
           {"old", s.old_file},
           {"patch", s.diff},
           {"comment", s.comment},
           {"meta", s.meta}};
    if (s.target_diff) j["target"] = *s.target_diff;
    return j;
}

ReviewSample sample_from_json(const json& j) {
    ReviewSample s;
    const FieldMapping canonical;
    std::string id;
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
        throw CorpusError("record without string id");
    id = j["id"].get<std::string>();
    if (auto reason = build_sample(j, canonical, s)) throw CorpusError("sample " + id + ": " + *reason);
    s.id = std::move(id);
    return s;
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::vector<ReviewSample> samples;
    for (const auto& j : jsonl::read(path)) samples.push_back(sample_from_json(j));
    return Corpus(std::move(samples), {path.string(), std::chrono::system_clock::now()});
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
    std::vector<json> records;
    records.reserve(corpus.size());
    for (const auto& s : corpus) records.push_back(sample_to_json(s));
    jsonl::write(path, records);
}

void save_rejects(const std::filesystem::path& path, const std::vector<Reject>& rejects) {
    std::vector<json> records;
    for (const auto& r : rejects) records.push_back(json{{"id", r.id}, {"reason", r.reason}});
    jsonl::write(path, records);
}

std::size_t train_size(std::size_t total, double train_fraction) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(total) * train_fraction));
}

Split split(const Corpus& corpus, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw CorpusError("train fraction must lie strictly between 0 and 1");
    if (corpus.size() < 2) throw CorpusError("cannot split a corpus of fewer than 2 samples");

    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    DeterministicRng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));

    const std::size_t cut = train_size(corpus.size(), train_fraction);
    std::vector<ReviewSample> train, eval;
    train.reserve(cut);
    eval.reserve(corpus.size() - cut);
    for (std::size_t k = 0; k < order.size(); ++k)
        (k < cut ? train : eval).push_back(corpus.samples()[order[k]]);
    return {Corpus(std::move(train), corpus.provenance()), Corpus(std::move(eval), corpus.provenance())};
}

std::vector<PairedSample> pair_subsets(const Corpus& original, const std::vector<CuratedComment>& curated,
                                       std::size_t n, std::uint64_t seed, Sampling sampling) {
    std::vector<const CuratedComment*> pool;
    pool.reserve(curated.size());
    std::set<std::string_view> seen;
    for (const auto& c : curated) {
        if (!original.find(c.id)) throw CorpusError("unpaired id " + c.id);
        if (!seen.insert(c.id).second) throw CorpusError("duplicate curated id " + c.id);
        pool.push_back(&c);
    }
    if (n > pool.size())
        throw CorpusError("requested " + std::to_string(n) + " pairs but only " +
                          std::to_string(pool.size()) + " curated ids are available");

    std::sort(pool.begin(), pool.end(), [](auto* a, auto* b) { return a->id < b->id; });
    DeterministicRng rng(seed);

    std::vector<const CuratedComment*> chosen;
    if (sampling == Sampling::uniform) {
        rng.shuffle(std::span<const CuratedComment*>(pool));
        chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
    } else {
        std::array<std::vector<const CuratedComment*>, kLanguageCount> strata;
        for (auto* c : pool)
            strata[static_cast<std::size_t>(original.find(c->id)->language)].push_back(c);

        // Floor quotas, then hand out the remainder by largest fractional part;
        // ties go to the earlier language.
        std::array<std::size_t, kLanguageCount> quota{};
        std::array<double, kLanguageCount> frac{};
        std::size_t assigned = 0;
        for (std::size_t l = 0; l < kLanguageCount; ++l) {
            const double exact = pool.empty() ? 0.0
                                              : static_cast<double>(n) * static_cast<double>(strata[l].size()) /
                                                    static_cast<double>(pool.size());
            quota[l] = static_cast<std::size_t>(std::floor(exact));
            frac[l] = exact - static_cast<double>(quota[l]);
            assigned += quota[l];
        }
        std::array<std::size_t, kLanguageCount> rank{};
        for (std::size_t l = 0; l < kLanguageCount; ++l) rank[l] = l;
        std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
        for (std::size_t k = 0; assigned < n; k = (k + 1) % kLanguageCount) {
            const auto l = rank[k];
            if (quota[l] < strata[l].size()) {
                ++quota[l];
                ++assigned;
            }
        }
        for (std::size_t l = 0; l < kLanguageCount; ++l) {
            rng.shuffle(std::span<const CuratedComment*>(strata[l]));
            chosen.insert(chosen.end(), strata[l].begin(),
                          strata[l].begin() + static_cast<std::ptrdiff_t>(quota[l]));
        }
    }

    std::sort(chosen.begin(), chosen.end(), [](auto* a, auto* b) { return a->id < b->id; });
    std::vector<PairedSample> out;
    out.reserve(chosen.size());
    for (auto* c : chosen) out.push_back({*original.find(c->id), c->text});
    return out;
}

}  // namespace curev::corpus
