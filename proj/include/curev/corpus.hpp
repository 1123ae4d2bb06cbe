#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "curev/error.hpp"

namespace curev::corpus {

enum class Language { php, ruby, csharp, c, java, python, cpp, go, javascript };

inline constexpr std::size_t kLanguageCount = 9;

/// Canonical lowercase name ("csharp", "javascript").
std::string_view language_name(Language lang);

/// Accepts canonical names plus the common short forms found in dumps
/// ("cs", "c#", "c++", "js", "py", "rb"), case-insensitively.
std::optional<Language> parse_language(std::string_view text);

struct ReviewSample {
    std::string id;
    Language language = Language::c;
    std::string old_file;  // empty when the source record had none
    std::string diff;
    std::string comment;
    // Post-review diff used as the code-refinement target, when the dump has one.
    std::optional<std::string> target_diff;
    std::map<std::string, std::string> meta;

    bool operator==(const ReviewSample&) const = default;
};

class CorpusError : public Error {
public:
    explicit CorpusError(const std::string& what) : Error("corpus", what) {}
};

struct Provenance {
    std::string source;
    std::chrono::system_clock::time_point imported_at{};
};

/// Immutable sample collection with unique ids, iterated in ascending id order.
class Corpus {
public:
    Corpus() = default;
    /// Sorts by id; throws CorpusError on a duplicate id.
    explicit Corpus(std::vector<ReviewSample> samples, Provenance provenance = {});

    const std::vector<ReviewSample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    auto begin() const { return samples_.begin(); }
    auto end() const { return samples_.end(); }

    const ReviewSample* find(std::string_view id) const;
    std::vector<std::string> ids() const;
    const Provenance& provenance() const { return provenance_; }

private:
    std::vector<ReviewSample> samples_;
    Provenance provenance_;
};

/// Upstream field names for each sample attribute.
struct FieldMapping {
    std::string id = "id";
    std::string language = "lang";
    std::string old_file = "old";
    std::string diff = "patch";
    std::string comment = "comment";
    std::string target_diff = "target";
    std::string meta = "meta";

    /// Overrides defaults with any keys present in `j` (same names as members).
    static FieldMapping from_json(const nlohmann::json& j);
};

struct Reject {
    std::string id;
    std::string reason;
    std::size_t line = 0;
};

struct ImportResult {
    Corpus corpus;
    std::vector<Reject> rejects;
};

/// Reads one JSON record per line. Records without an id get the zero-padded
/// ordinal of their position in the stream. Malformed records (bad JSON,
/// missing or empty comment, missing diff or language, unknown language,
/// unparseable diff, duplicate id) go to `rejects`; nothing is dropped
/// silently. An empty stream yields an empty corpus.
ImportResult import_samples(std::istream& source, const FieldMapping& mapping,
                            std::string source_name = "<stream>");
/// Throws IoError when the file cannot be read.
ImportResult import_samples(const std::filesystem::path& source, const FieldMapping& mapping);

std::string ordinal_id(std::size_t ordinal);

// Canonical record keys: id, lang, old, patch, comment, meta, and optional target.
nlohmann::json sample_to_json(const ReviewSample& sample);
/// Strict canonical-schema reader; throws CorpusError naming the field.
ReviewSample sample_from_json(const nlohmann::json& j);

Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);
void save_rejects(const std::filesystem::path& path, const std::vector<Reject>& rejects);

struct Split {
    Corpus train;
    Corpus eval;
};

/// Seeded shuffle then prefix cut: |train| = floor(|corpus| * train_fraction).
/// Requires 0 < train_fraction < 1 and at least two samples.
Split split(const Corpus& corpus, double train_fraction, std::uint64_t seed);

std::size_t train_size(std::size_t total, double train_fraction);

/// Reformulated comment r'_i for one kept sample id.
struct CuratedComment {
    std::string id;
    std::string text;
};

/// One original sample with its reformulated comment.
struct PairedSample {
    ReviewSample sample;
    std::string curated_comment;

    bool operator==(const PairedSample&) const = default;
};

enum class Sampling {
    uniform,
    stratified_by_language,  // proportional quotas, largest remainder
};

/// Draws `n` curated ids without replacement and pairs each with its original
/// sample. Output is sorted by id and depends only on (inputs, n, seed).
/// Throws CorpusError "unpaired id" when a curated id is missing from the
/// original corpus, and when n exceeds the available ids.
std::vector<PairedSample> pair_subsets(const Corpus& original,
                                       const std::vector<CuratedComment>& curated, std::size_t n,
                                       std::uint64_t seed, Sampling sampling = Sampling::uniform);

}  // namespace curev::corpus
