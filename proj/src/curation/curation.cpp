#include "curev/curation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "curev/jsonl.hpp"
#include "curev/label_json.hpp"
#include "curev/parse.hpp"

namespace curev::curation {

using nlohmann::json;

JudgmentIndex index_judgments(const std::vector<judge::JudgedRecord>& records) {
    JudgmentIndex index;
    for (const auto& r : records)
        if (!index.emplace(r.id, r.judgment).second) throw CurationError("duplicate judgment for " + r.id);
    return index;
}

FilterResult filter_irrelevant(const corpus::Corpus& corpus, const JudgmentIndex& judgments, int threshold) {
    if (!score_in_range(threshold)) throw CurationError("threshold must lie in 1..10");
    std::vector<corpus::ReviewSample> kept;
    FilterResult out;
    for (const auto& s : corpus) {
        auto it = judgments.find(s.id);
        if (it == judgments.end()) throw MissingJudgment(s.id);
        if (it->second.labels.relevance < threshold) {
            out.removed.push_back(s.id);
        } else {
            kept.push_back(s);
        }
    }
    out.kept = corpus::Corpus(std::move(kept), corpus.provenance());
    return out;
}

CurationRun curate(const corpus::Corpus& kept, const JudgmentIndex& judgments, judge::Backend& backend,
                   const judge::JudgeConfig& config, const judge::PromptTemplates& templates,
                   const judge::SleepFn& sleep) {
    config.validate();
    const auto& samples = kept.samples();
    for (const auto& s : samples)
        if (!judgments.count(s.id)) throw MissingJudgment(s.id);

    std::vector<std::optional<CuratedSample>> results(samples.size());
    std::vector<std::optional<judge::FailedSample>> failures(samples.size());

    judge::for_each_bounded(samples.size(), config.max_parallel, [&](std::size_t i) {
        const auto& sample = samples[i];
        int attempts = 0;

        // Runs one prompt kind until its reply parses, or records the failure.
        auto obtain = [&](const judge::JudgePrompt& prompt, auto parse_fn) -> decltype(parse_fn(std::string_view{})) {
            std::string error;
            for (int round = 0; round <= config.max_parse_retries; ++round) {
                try {
                    auto response = judge::complete(backend, prompt, config, sleep);
                    attempts += response.attempt_index + 1;
                    return parse_fn(response.raw_text);
                } catch (const parse::ParseError& e) {
                    error = e.what();
                } catch (const judge::BackendUnavailable& e) {
                    attempts += e.attempts();
                    error = e.what();
                    break;
                } catch (const judge::JudgeTimeout& e) {
                    attempts += e.attempts();
                    error = e.what();
                    break;
                }
            }
            failures[i] = judge::FailedSample{sample.id, error, attempts, std::string(judge::kind_name(prompt.kind))};
            return std::nullopt;
        };

        auto reformulated = obtain(judge::build_reformulation_prompt(sample, templates),
                                   [](std::string_view raw) -> std::optional<std::string> {
                                       return parse::parse_reformulation(raw);
                                   });
        if (!reformulated) return;
        auto post = obtain(judge::build_reevaluation_prompt(sample, *reformulated, templates),
                           [](std::string_view raw) -> std::optional<PostJudgment> {
                               return parse::parse_post_judgment(raw);
                           });
        if (!post) return;

        results[i] = CuratedSample{sample.id, sample.comment, std::move(*reformulated),
                                   judgments.find(sample.id)->second.labels.relevance, *post};
    });

    CurationRun run;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (results[i]) run.curated.push_back(std::move(*results[i]));
        if (failures[i]) run.quarantined.push_back(std::move(*failures[i]));
    }
    return run;
}

json curated_to_json(const CuratedSample& s) {
    return json{{"id", s.id},
                {"comment_original", s.comment_original},
                {"comment_curated", s.reformulated_comment},
                {"carried_relevance", s.carried_relevance},
                {"post_judgment", post_judgment_to_json(s.post_judgment)}};
}

CuratedSample curated_from_json(const json& j) {
    auto text = [&](const char* key) {
        if (!j.is_object() || !j.contains(key) || !j[key].is_string()) throw SchemaError(key, "expected a string");
        return j[key].get<std::string>();
    };
    CuratedSample s;
    s.id = text("id");
    s.comment_original = text("comment_original");
    s.reformulated_comment = text("comment_curated");
    if (!j.contains("carried_relevance") || !j["carried_relevance"].is_number_integer())
        throw SchemaError("carried_relevance", "expected an integer");
    s.carried_relevance = j["carried_relevance"].get<int>();
    if (!score_in_range(s.carried_relevance)) throw SchemaError("carried_relevance", "score out of range 1..10");
    if (!j.contains("post_judgment")) throw SchemaError("post_judgment", "missing");
    s.post_judgment = post_judgment_from_json(j["post_judgment"]);
    return s;
}

std::vector<CuratedSample> load_curated(const std::filesystem::path& path) {
    std::vector<CuratedSample> out;
    for (const auto& j : jsonl::read(path)) out.push_back(curated_from_json(j));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

void save_curated(const std::filesystem::path& path, const std::vector<CuratedSample>& curated) {
    std::vector<json> out;
    out.reserve(curated.size());
    for (const auto& c : curated) out.push_back(curated_to_json(c));
    jsonl::write(path, out);
}

namespace {

struct Accumulator {
    double clarity = 0.0;
    double conciseness = 0.0;
    std::size_t n = 0;

    void add(int c, int k) {
        clarity += c;
        conciseness += k;
        ++n;
    }
    std::optional<double> mean_clarity() const {
        return n ? std::optional<double>(clarity / static_cast<double>(n)) : std::nullopt;
    }
    std::optional<double> mean_conciseness() const {
        return n ? std::optional<double>(conciseness / static_cast<double>(n)) : std::nullopt;
    }
};

template <class E>
struct Grouped {
    std::array<Accumulator, label_count<E>> groups{};
};

double pct(std::size_t count, std::size_t total) {
    return total ? 100.0 * static_cast<double>(count) / static_cast<double>(total) : 0.0;
}

template <class E>
void push_rows(std::vector<EvolutionRow>& rows, const Grouped<E>& before, const Grouped<E>& after) {
    for (E e : all_labels<E>()) {
        const auto i = static_cast<std::size_t>(e);
        rows.push_back({std::string(LabelSpace<E>::category), std::string(label_name(e)),
                        {before.groups[i].mean_clarity(), after.groups[i].mean_clarity()},
                        {before.groups[i].mean_conciseness(), after.groups[i].mean_conciseness()}});
    }
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string cell(const MeanShift& m) {
    if (!m.after) return "--";
    std::string out = fmt2(*m.after);
    if (auto d = m.delta()) {
        // Round before choosing the arrow so "0.00" never carries one.
        const double shown = std::round(*d * 100.0) / 100.0;
        const char* arrow = shown > 0 ? "↑" : shown < 0 ? "↓" : "=";
        out += std::string(" (") + arrow + " " + fmt2(std::fabs(shown)) + ")";
    }
    return out;
}

std::string pad(const std::string& s, std::size_t width) {
    // Width in code points so arrows do not skew the columns.
    std::size_t cps = 0;
    for (unsigned char c : s) cps += (c & 0xC0) != 0x80;
    return cps >= width ? s + " " : s + std::string(width - cps, ' ');
}

json shift_json(const MeanShift& m) {
    json j;
    j["before"] = m.before ? json(*m.before) : json(nullptr);
    j["after"] = m.after ? json(*m.after) : json(nullptr);
    auto d = m.delta();
    j["delta"] = d ? json(*d) : json(nullptr);
    return j;
}

}  // namespace

CurationReport evolution_report(const std::vector<judge::JudgedRecord>& original,
                                const std::vector<CuratedSample>& curated) {
    std::map<std::string_view, const Judgment*> by_id;
    for (const auto& r : original) by_id[r.id] = &r.judgment;

    Grouped<IssueType> type_before, type_after;
    Grouped<Nature> nature_before, nature_after;
    Grouped<Civility> civ_before, civ_after;
    Accumulator all_before, all_after;
    std::array<std::size_t, label_count<Nature>> nature_count_before{}, nature_count_after{};
    std::array<std::size_t, label_count<Civility>> civ_count_before{}, civ_count_after{};

    for (const auto& r : original) {
        const auto& l = r.judgment.labels;
        for (auto t : l.types.labels()) type_before.groups[static_cast<std::size_t>(t)].add(l.clarity, l.conciseness);
        for (auto n : l.natures.labels()) {
            nature_before.groups[static_cast<std::size_t>(n)].add(l.clarity, l.conciseness);
            ++nature_count_before[static_cast<std::size_t>(n)];
        }
        civ_before.groups[static_cast<std::size_t>(l.civility)].add(l.clarity, l.conciseness);
        ++civ_count_before[static_cast<std::size_t>(l.civility)];
        all_before.add(l.clarity, l.conciseness);
    }

    for (const auto& c : curated) {
        auto it = by_id.find(c.id);
        if (it == by_id.end()) throw CurationError("curated id " + c.id + " has no original judgment");
        const auto& p = c.post_judgment;
        for (auto t : it->second->labels.types.labels())
            type_after.groups[static_cast<std::size_t>(t)].add(p.clarity, p.conciseness);
        for (auto n : p.natures.labels()) {
            nature_after.groups[static_cast<std::size_t>(n)].add(p.clarity, p.conciseness);
            ++nature_count_after[static_cast<std::size_t>(n)];
        }
        civ_after.groups[static_cast<std::size_t>(p.civility)].add(p.clarity, p.conciseness);
        ++civ_count_after[static_cast<std::size_t>(p.civility)];
        all_after.add(p.clarity, p.conciseness);
    }

    CurationReport report;
    push_rows(report.evolution, type_before, type_after);
    push_rows(report.evolution, nature_before, nature_after);
    push_rows(report.evolution, civ_before, civ_after);
    report.evolution.push_back({"Average", "--",
                                {all_before.mean_clarity(), all_after.mean_clarity()},
                                {all_before.mean_conciseness(), all_after.mean_conciseness()}});

    for (Nature n : all_labels<Nature>()) {
        const auto i = static_cast<std::size_t>(n);
        report.nature.push_back({"Nature", std::string(label_name(n)), nature_count_before[i],
                                 pct(nature_count_before[i], original.size()), nature_count_after[i],
                                 pct(nature_count_after[i], curated.size())});
    }
    for (Civility c : all_labels<Civility>()) {
        const auto i = static_cast<std::size_t>(c);
        report.civility.push_back({"Civility", std::string(label_name(c)), civ_count_before[i],
                                   pct(civ_count_before[i], original.size()), civ_count_after[i],
                                   pct(civ_count_after[i], curated.size())});
    }

    report.civility_populations.push_back({"original (pre-filter)", original.size(),
                                           civ_count_before[0], civ_count_before[1]});
    report.civility_populations.push_back({"curated", curated.size(), civ_count_after[0], civ_count_after[1]});
    report.curated = curated.size();
    return report;
}

CurationReport make_report(const std::vector<judge::JudgedRecord>& original,
                           const std::vector<CuratedSample>& curated, const std::vector<std::string>& removed_ids,
                           std::size_t quarantined) {
    auto report = evolution_report(original, curated);
    report.removed_ids = removed_ids;
    report.quarantined = quarantined;
    report.kept = curated.size() + quarantined;
    report.total_in = report.kept + removed_ids.size();

    // Post-filter population: originals that survived filtering.
    std::set<std::string_view> removed(removed_ids.begin(), removed_ids.end());
    CivilityCounts post{"original (post-filter)", 0, 0, 0};
    for (const auto& r : original) {
        if (removed.count(r.id)) continue;
        ++post.total;
        (r.judgment.labels.civility == Civility::civil ? post.civil : post.uncivil)++;
    }
    report.civility_populations.insert(report.civility_populations.begin() + 1, post);
    return report;
}

json report_to_json(const CurationReport& r) {
    json evolution = json::array();
    for (const auto& row : r.evolution)
        evolution.push_back({{"category", row.category},
                             {"subcategory", row.subcategory},
                             {"clarity", shift_json(row.clarity)},
                             {"conciseness", shift_json(row.conciseness)}});
    auto proportions = [](const std::vector<ProportionRow>& rows) {
        json out = json::array();
        for (const auto& p : rows)
            out.push_back({{"subcategory", p.subcategory},
                           {"before_count", p.before_count},
                           {"before_pct", p.before_pct},
                           {"after_count", p.after_count},
                           {"after_pct", p.after_pct}});
        return out;
    };
    json populations = json::array();
    for (const auto& c : r.civility_populations)
        populations.push_back({{"population", c.population}, {"total", c.total}, {"civil", c.civil}, {"uncivil", c.uncivil}});

    return json{{"total_in", r.total_in},
                {"removed", r.removed_ids.size()},
                {"removed_ids", r.removed_ids},
                {"kept", r.kept},
                {"curated", r.curated},
                {"quarantined", r.quarantined},
                {"evolution", evolution},
                {"nature", proportions(r.nature)},
                {"civility", proportions(r.civility)},
                {"civility_populations", populations}};
}

std::string render_report(const CurationReport& r) {
    std::string out;
    out += "total_in " + std::to_string(r.total_in) + "  removed " + std::to_string(r.removed_ids.size()) +
           "  kept " + std::to_string(r.kept) + "  curated " + std::to_string(r.curated) + "  quarantined " +
           std::to_string(r.quarantined) + "\n\n";

    out += pad("Category", 10) + pad("Subcategory", 15) + pad("Clarity", 17) + "Conciseness\n";
    std::string last_category;
    for (const auto& row : r.evolution) {
        const auto category = row.category == last_category ? "" : row.category;
        last_category = row.category;
        out += pad(category, 10) + pad(row.subcategory, 15) + pad(cell(row.clarity), 17) + cell(row.conciseness) + "\n";
    }

    out += "\n" + pad("Category", 10) + pad("Subcategory", 15) + pad("Before", 18) + "After\n";
    auto proportion_rows = [&](const std::vector<ProportionRow>& rows) {
        bool first = true;
        for (const auto& p : rows) {
            const char* arrow = p.after_pct > p.before_pct ? "↑" : p.after_pct < p.before_pct ? "↓" : "=";
            out += pad(first ? p.category : "", 10) + pad(p.subcategory, 15) +
                   pad(std::to_string(p.before_count) + " (" + fmt2(p.before_pct) + "%)", 18) +
                   std::to_string(p.after_count) + " (" + fmt2(p.after_pct) + "%) " + arrow + "\n";
            first = false;
        }
    };
    proportion_rows(r.nature);
    proportion_rows(r.civility);

    out += "\nCivility by population\n";
    for (const auto& c : r.civility_populations)
        out += pad(c.population, 25) + "civil " + std::to_string(c.civil) + " / " + std::to_string(c.total) +
               "  uncivil " + std::to_string(c.uncivil) + "\n";
    return out;
}

}  // namespace curev::curation
