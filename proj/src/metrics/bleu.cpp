#include "curev/metrics/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace curev::metrics {

NgramStats& NgramStats::operator+=(const NgramStats& other) {
    if (other.max_n() != max_n()) throw MetricError("n-gram order mismatch");
    for (std::size_t n = 0; n < matches.size(); ++n) {
        matches[n] += other.matches[n];
        totals[n] += other.totals[n];
    }
    candidate_length += other.candidate_length;
    reference_length += other.reference_length;
    return *this;
}

namespace {

using Counts = std::unordered_map<std::string, int>;

// N-grams keyed by their tokens joined with a unit separator.
Counts count_ngrams(const Tokens& tokens, std::size_t n) {
    Counts counts;
    if (tokens.size() < n) return counts;
    std::string key;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        key.clear();
        for (std::size_t k = 0; k < n; ++k) {
            if (k) key += '\x1f';
            key += tokens[i + k];
        }
        ++counts[key];
    }
    return counts;
}

}  // namespace

NgramStats ngram_stats(const Tokens& candidate, const Tokens& reference, int max_n, const TokenWeight& unigram_weight) {
    if (max_n < 1) throw MetricError("max_n must be >= 1");
    NgramStats stats(max_n);
    stats.candidate_length = static_cast<std::int64_t>(candidate.size());
    stats.reference_length = static_cast<std::int64_t>(reference.size());
    for (int n = 1; n <= max_n; ++n) {
        const auto cand = count_ngrams(candidate, static_cast<std::size_t>(n));
        const auto ref = count_ngrams(reference, static_cast<std::size_t>(n));
        double matched = 0.0, total = 0.0;
        if (n == 1 && unigram_weight) {
            // Iterate in token order so the floating-point sum is reproducible.
            Counts seen;
            for (const auto& t : candidate) {
                if (seen[t]++) continue;
                const int c = cand.at(t);
                auto it = ref.find(t);
                const double w = unigram_weight(t);
                matched += w * std::min(c, it == ref.end() ? 0 : it->second);
                total += w * c;
            }
        } else {
            for (const auto& [gram, c] : cand) {
                auto it = ref.find(gram);
                matched += std::min(c, it == ref.end() ? 0 : it->second);
                total += c;
            }
        }
        stats.matches[static_cast<std::size_t>(n - 1)] = matched;
        stats.totals[static_cast<std::size_t>(n - 1)] = total;
    }
    return stats;
}

double bleu_from_stats(const NgramStats& s) {
    if (s.candidate_length == 0 && s.reference_length == 0) return 1.0;
    if (s.matches.empty() || s.matches[0] <= 0.0) return 0.0;

    bool smooth = false;
    for (std::size_t n = 1; n < s.matches.size(); ++n) smooth = smooth || s.matches[n] <= 0.0;

    double log_sum = 0.0;
    for (std::size_t n = 0; n < s.matches.size(); ++n) {
        double m = s.matches[n], t = s.totals[n];
        if (n > 0 && smooth) {
            m += 1.0;
            t += 1.0;
        }
        log_sum += std::log(m / t);
    }
    const double geo = std::exp(log_sum / static_cast<double>(s.matches.size()));
    const double c = static_cast<double>(s.candidate_length);
    const double r = static_cast<double>(s.reference_length);
    const double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
    return geo * bp;
}

NgramStats corpus_ngram_stats(std::span<const Tokens> candidates, std::span<const Tokens> references, int max_n,
                              Execution exec, const TokenWeight& unigram_weight) {
    if (candidates.size() != references.size()) throw MetricError("candidates and references differ in length");
    NgramStats total(max_n);
    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < candidates.size(); ++i)
            total += ngram_stats(candidates[i], references[i], max_n, unigram_weight);
        return total;
    }
    std::vector<NgramStats> per(candidates.size(), NgramStats(max_n));
    const auto count = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        per[k] = ngram_stats(candidates[k], references[k], max_n, unigram_weight);
    }
    for (const auto& p : per) total += p;
    return total;
}

double bleu(std::span<const std::string> candidates, std::span<const std::string> references, int max_n,
            Execution exec) {
    if (candidates.size() != references.size()) throw MetricError("candidates and references differ in length");
    if (candidates.empty()) throw MetricError("empty pair list");
    std::vector<Tokens> cand, ref;
    cand.reserve(candidates.size());
    ref.reserve(references.size());
    for (const auto& c : candidates) cand.push_back(tokenize(c));
    for (const auto& r : references) ref.push_back(tokenize(r));
    return bleu_from_stats(corpus_ngram_stats(cand, ref, max_n, exec));
}

}  // namespace curev::metrics
