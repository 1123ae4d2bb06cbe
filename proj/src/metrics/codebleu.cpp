#include "curev/metrics/codebleu.hpp"

#include <cmath>
#include <map>

namespace curev::metrics {

void CodeBleuWeights::validate() const {
    for (double w : values)
        if (!std::isfinite(w) || w < 0.0) throw MetricError("CodeBLEU weights must be finite and non-negative");
}

double combine(const Components& components, const CodeBleuWeights& weights, CodeBleuWeights* used) {
    weights.validate();
    double mass = 0.0;
    for (std::size_t i = 0; i < components.size(); ++i)
        if (components[i]) mass += weights.values[i];
    if (mass <= 0.0) throw MetricError("no available CodeBLEU component carries weight");

    CodeBleuWeights rescaled;
    double total = 0.0;
    for (std::size_t i = 0; i < components.size(); ++i) {
        rescaled.values[i] = components[i] ? weights.values[i] / mass : 0.0;
        if (components[i]) total += rescaled.values[i] * *components[i];
    }
    if (used) *used = rescaled;
    return total;
}

CodeBleuStats& CodeBleuStats::operator+=(const CodeBleuStats& o) {
    ngram += o.ngram;
    weighted += o.weighted;
    ast_matched += o.ast_matched;
    ast_total += o.ast_total;
    dataflow_matched += o.dataflow_matched;
    dataflow_total += o.dataflow_total;
    unparseable_pairs += o.unparseable_pairs;
    return *this;
}

namespace {

template <class T>
std::int64_t multiset_matches(const std::vector<T>& reference, const std::vector<T>& candidate) {
    std::map<T, std::int64_t> pool;
    for (const auto& c : candidate) ++pool[c];
    std::int64_t matched = 0;
    for (const auto& r : reference) {
        auto it = pool.find(r);
        if (it != pool.end() && it->second > 0) {
            --it->second;
            ++matched;
        }
    }
    return matched;
}

CodeBleuStats pair_stats(const std::string& candidate, const std::string& reference, corpus::Language language,
                         const GrammarProvider& grammar, const std::set<std::string, std::less<>>& keywords) {
    CodeBleuStats s;
    const auto cand = tokenize(candidate);
    const auto ref = tokenize(reference);
    s.ngram = ngram_stats(cand, ref);
    s.weighted = ngram_stats(cand, ref, kBleuOrder, [&](const std::string& t) {
        return keywords.count(t) ? kKeywordWeight : kOtherTokenWeight;
    });
    if (!grammar.supports(language)) return s;

    const auto cand_tree = grammar.parse(candidate, language);
    const auto ref_tree = grammar.parse(reference, language);
    if (cand_tree.has_errors && ref_tree.has_errors) {
        s.unparseable_pairs = 1;
        return s;
    }
    const auto ref_subtrees = subtree_sexps(ref_tree.root);
    s.ast_total = static_cast<std::int64_t>(ref_subtrees.size());
    s.ast_matched = multiset_matches(ref_subtrees, subtree_sexps(cand_tree.root));

    const auto ref_edges = normalize_dataflow(grammar.dataflow(ref_tree));
    s.dataflow_total = static_cast<std::int64_t>(ref_edges.size());
    s.dataflow_matched = multiset_matches(ref_edges, normalize_dataflow(grammar.dataflow(cand_tree)));
    return s;
}

}  // namespace

CodeBleuStats codebleu_stats(const std::string& candidate, const std::string& reference, corpus::Language language,
                             const GrammarProvider& grammar) {
    return pair_stats(candidate, reference, language, grammar, grammar.keywords(language));
}

CodeBleuScore codebleu_from_stats(const CodeBleuStats& s, bool language_supported, const CodeBleuWeights& weights) {
    CodeBleuScore out;
    out.ngram = bleu_from_stats(s.ngram);
    out.weighted_ngram = bleu_from_stats(s.weighted);
    if (!language_supported) {
        out.warnings.push_back("language not supported by the grammar; ast and dataflow dropped");
    } else {
        if (s.unparseable_pairs > 0)
            out.warnings.push_back(std::to_string(s.unparseable_pairs) +
                                   " pair(s) unparseable on both sides; excluded from ast and dataflow");
        if (s.ast_total > 0) {
            out.ast = static_cast<double>(s.ast_matched) / static_cast<double>(s.ast_total);
        } else {
            out.warnings.push_back("ast unavailable: no reference subtrees");
        }
        if (s.dataflow_total > 0) {
            out.dataflow = static_cast<double>(s.dataflow_matched) / static_cast<double>(s.dataflow_total);
        } else {
            out.warnings.push_back("dataflow unavailable: no reference data-flow edges");
        }
    }
    out.combined = combine({out.ngram, out.weighted_ngram, out.ast, out.dataflow}, weights, &out.weights_used);
    return out;
}

CodeBleuScore codebleu(const std::string& candidate, const std::string& reference, corpus::Language language,
                       const CodeBleuWeights& weights, const GrammarProvider& grammar) {
    weights.validate();
    return codebleu_from_stats(codebleu_stats(candidate, reference, language, grammar), grammar.supports(language),
                               weights);
}

CodeBleuStats corpus_codebleu_stats(std::span<const std::string> candidates, std::span<const std::string> references,
                                    corpus::Language language, const GrammarProvider& grammar, Execution exec) {
    if (candidates.size() != references.size()) throw MetricError("candidates and references differ in length");
    const auto keywords = grammar.keywords(language);
    CodeBleuStats total;
    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < candidates.size(); ++i)
            total += pair_stats(candidates[i], references[i], language, grammar, keywords);
        return total;
    }
    std::vector<CodeBleuStats> per(candidates.size());
    const auto count = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        per[k] = pair_stats(candidates[k], references[k], language, grammar, keywords);
    }
    for (const auto& p : per) total += p;
    return total;
}

CodeBleuScore corpus_codebleu(std::span<const std::string> candidates, std::span<const std::string> references,
                              corpus::Language language, const CodeBleuWeights& weights,
                              const GrammarProvider& grammar, Execution exec) {
    weights.validate();
    if (candidates.empty()) throw MetricError("empty pair list");
    return codebleu_from_stats(corpus_codebleu_stats(candidates, references, language, grammar, exec),
                               grammar.supports(language), weights);
}

}  // namespace curev::metrics
