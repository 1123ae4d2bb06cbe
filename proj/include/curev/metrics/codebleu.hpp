#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curev/metrics/bleu.hpp"
#include "curev/metrics/grammar.hpp"

namespace curev::metrics {

inline constexpr double kKeywordWeight = 1.0;
inline constexpr double kOtherTokenWeight = 0.2;

/// Component weights in order ngram, weighted_ngram, ast, dataflow.
struct CodeBleuWeights {
    std::array<double, 4> values{0.25, 0.25, 0.25, 0.25};

    /// Throws MetricError for negative or non-finite weights.
    void validate() const;
    bool operator==(const CodeBleuWeights&) const = default;
};

/// Component scores; ast and dataflow are absent when unavailable.
using Components = std::array<std::optional<double>, 4>;

/// Weighted sum over the available components with their weights rescaled to
/// sum to 1. `used` receives the rescaled weights (0 for absent components).
/// Throws MetricError when every available component has weight 0.
double combine(const Components& components, const CodeBleuWeights& weights, CodeBleuWeights* used = nullptr);

struct CodeBleuStats {
    NgramStats ngram;
    NgramStats weighted;
    std::int64_t ast_matched = 0;
    std::int64_t ast_total = 0;
    std::int64_t dataflow_matched = 0;
    std::int64_t dataflow_total = 0;
    std::int64_t unparseable_pairs = 0;  // both sides failed to parse

    CodeBleuStats& operator+=(const CodeBleuStats& other);
    bool operator==(const CodeBleuStats&) const = default;
};

struct CodeBleuScore {
    double ngram = 0.0;
    double weighted_ngram = 0.0;
    std::optional<double> ast;
    std::optional<double> dataflow;
    double combined = 0.0;
    CodeBleuWeights weights_used;
    std::vector<std::string> warnings;
};

/// Statistics for one pair. Syntax components are only gathered when the
/// grammar supports `language`.
CodeBleuStats codebleu_stats(const std::string& candidate, const std::string& reference, corpus::Language language,
                             const GrammarProvider& grammar);

CodeBleuScore codebleu_from_stats(const CodeBleuStats& stats, bool language_supported,
                                  const CodeBleuWeights& weights);

/// ngram is BLEU over code tokens; weighted_ngram weights keyword unigrams
/// 5:1 against other tokens; ast is the share of reference non-leaf subtrees
/// found in the candidate; dataflow the share of normalized reference
/// variable-use edges found in the candidate. A component with nothing to
/// compare (unsupported language, no reference edges, both sides
/// unparseable) is dropped and the weights are renormalized.
CodeBleuScore codebleu(const std::string& candidate, const std::string& reference, corpus::Language language,
                       const CodeBleuWeights& weights, const GrammarProvider& grammar);

/// Corpus CodeBLEU: statistics are summed over pairs before scoring.
CodeBleuScore corpus_codebleu(std::span<const std::string> candidates, std::span<const std::string> references,
                              corpus::Language language, const CodeBleuWeights& weights,
                              const GrammarProvider& grammar, Execution exec = Execution::serial);

CodeBleuStats corpus_codebleu_stats(std::span<const std::string> candidates, std::span<const std::string> references,
                                    corpus::Language language, const GrammarProvider& grammar, Execution exec);

}  // namespace curev::metrics
