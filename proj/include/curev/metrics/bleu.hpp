#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "curev/error.hpp"
#include "curev/metrics/tokenize.hpp"

namespace curev::metrics {

class MetricError : public Error {
public:
    explicit MetricError(const std::string& what) : Error("metrics", what) {}
};

/// Selects the serial reference loop or the OpenMP kernel. Both produce
/// bit-identical results: per-pair statistics are reduced in index order.
enum class Execution { serial, parallel };

inline constexpr int kBleuOrder = 4;

/// Clipped n-gram statistics. `matches[n-1]` and `totals[n-1]` may be
/// fractional when token weights are applied.
struct NgramStats {
    std::vector<double> matches;
    std::vector<double> totals;
    std::int64_t candidate_length = 0;
    std::int64_t reference_length = 0;

    explicit NgramStats(int max_n = kBleuOrder) : matches(static_cast<std::size_t>(max_n), 0.0), totals(matches) {}
    int max_n() const { return static_cast<int>(matches.size()); }
    NgramStats& operator+=(const NgramStats& other);
    bool operator==(const NgramStats&) const = default;
};

/// Weight of a unigram; higher orders are always unweighted.
using TokenWeight = std::function<double(const std::string&)>;

NgramStats ngram_stats(const Tokens& candidate, const Tokens& reference, int max_n = kBleuOrder,
                       const TokenWeight& unigram_weight = {});

/// Geometric mean of the n-gram precisions times the brevity penalty.
/// When some order above 1 has no match, every order above 1 gets +1 on
/// numerator and denominator. No unigram match gives 0; an all-empty corpus
/// (both sides length 0) gives 1.
double bleu_from_stats(const NgramStats& stats);

/// Corpus BLEU over tokenized text. Throws MetricError on length mismatch or
/// an empty list.
double bleu(std::span<const std::string> candidates, std::span<const std::string> references, int max_n = kBleuOrder,
            Execution exec = Execution::serial);

/// Sum of per-pair statistics, accumulated serially or under OpenMP.
NgramStats corpus_ngram_stats(std::span<const Tokens> candidates, std::span<const Tokens> references, int max_n,
                              Execution exec, const TokenWeight& unigram_weight = {});

}  // namespace curev::metrics
