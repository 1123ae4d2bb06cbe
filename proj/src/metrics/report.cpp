#include "curev/metrics/report.hpp"

#include <cstdio>
#include <map>

#include "curev/diff.hpp"
#include "curev/jsonl.hpp"

namespace curev::metrics {

using nlohmann::json;

std::vector<TextRecord> load_texts(const std::filesystem::path& path) {
    std::vector<TextRecord> out;
    std::map<std::string, bool, std::less<>> seen;
    for (const auto& j : jsonl::read(path)) {
        if (!j.is_object() || !j.contains("id") || !j.contains("text") || !j["id"].is_string() ||
            !j["text"].is_string())
            throw MetricError(path.string() + ": records need string fields id and text");
        TextRecord r{j["id"].get<std::string>(), j["text"].get<std::string>()};
        if (seen.count(r.id)) throw MetricError(path.string() + ": duplicate id " + r.id);
        seen[r.id] = true;
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

std::string post_change(const std::string& text) {
    try {
        return corpus::new_side(corpus::parse_unified_diff(text));
    } catch (const corpus::DiffError&) {
        return text;
    }
}

std::string fmt(double v, const char* spec) {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

MetricReport evaluate(const std::vector<TextRecord>& candidates, const std::vector<TextRecord>& references,
                      const EvalOptions& options) {
    std::map<std::string_view, const std::string*> cand;
    for (const auto& c : candidates) cand[c.id] = &c.text;

    std::vector<std::string> missing;
    std::vector<std::string> cand_texts, ref_texts;
    std::map<std::string_view, const std::string*> ref_sorted;
    for (const auto& r : references) ref_sorted[r.id] = &r.text;
    for (const auto& [id, text] : ref_sorted) {
        auto it = cand.find(id);
        if (it == cand.end()) {
            missing.emplace_back(id);
            continue;
        }
        cand_texts.push_back(*it->second);
        ref_texts.push_back(*text);
    }
    for (const auto& [id, _] : cand)
        if (!ref_sorted.count(id)) missing.emplace_back(id);
    if (!missing.empty()) {
        std::string what = "candidate and reference ids differ:";
        for (std::size_t i = 0; i < missing.size() && i < 10; ++i) what += " " + missing[i];
        if (missing.size() > 10) what += " ...";
        throw MetricError(what);
    }
    if (cand_texts.empty()) throw MetricError("empty pair list");

    MetricReport report;
    report.total = cand_texts.size();
    report.bleu = bleu(cand_texts, ref_texts, kBleuOrder, options.exec);
    report.exact_match_count = exact_match(cand_texts, ref_texts, options.match_mode, options.exec);
    if (options.language) {
        static const CLikeGrammar grammar;
        if (options.diff_new_side) {
            for (auto& t : cand_texts) t = post_change(t);
            for (auto& t : ref_texts) t = post_change(t);
        }
        report.codebleu =
            corpus_codebleu(cand_texts, ref_texts, *options.language, options.weights, grammar, options.exec);
    }
    return report;
}

json report_to_json(const MetricReport& r) {
    json j{{"bleu", r.bleu}, {"exact_match_count", r.exact_match_count}, {"total", r.total}};
    if (r.codebleu) {
        const auto& c = *r.codebleu;
        j["codebleu"] = {{"ngram", c.ngram},
                         {"weighted_ngram", c.weighted_ngram},
                         {"ast", optional_json(c.ast)},
                         {"dataflow", optional_json(c.dataflow)},
                         {"combined", c.combined},
                         {"weights", c.weights_used.values},
                         {"warnings", c.warnings}};
    } else {
        j["codebleu"] = nullptr;
    }
    return j;
}

std::string render_report(const MetricReport& r) {
    std::string out;
    out += "pairs        " + std::to_string(r.total) + "\n";
    out += "BLEU         " + fmt(r.bleu, "%.4f") + " (" + fmt(r.bleu * 100.0, "%.2f") + ")\n";
    out += "Exact match  " + std::to_string(r.exact_match_count) + " / " + std::to_string(r.total) + "\n";
    if (r.codebleu) {
        const auto& c = *r.codebleu;
        auto opt = [](const std::optional<double>& v) { return v ? fmt(*v, "%.4f") : std::string("--"); };
        out += "CodeBLEU     " + fmt(c.combined, "%.4f") + "\n";
        out += "  ngram           " + fmt(c.ngram, "%.4f") + "  w=" + fmt(c.weights_used.values[0], "%.3f") + "\n";
        out += "  weighted_ngram  " + fmt(c.weighted_ngram, "%.4f") + "  w=" + fmt(c.weights_used.values[1], "%.3f") + "\n";
        out += "  ast             " + opt(c.ast) + "  w=" + fmt(c.weights_used.values[2], "%.3f") + "\n";
        out += "  dataflow        " + opt(c.dataflow) + "  w=" + fmt(c.weights_used.values[3], "%.3f") + "\n";
        for (const auto& w : c.warnings) out += "  warning: " + w + "\n";
    }
    return out;
}

}  // namespace curev::metrics
