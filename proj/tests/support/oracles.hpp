#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "curev/metrics/tokenize.hpp"

namespace curev::testing {

/// Cohen's kappa from an explicit confusion matrix and both marginals,
/// applied term by term.
inline double brute_force_kappa(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                                std::size_t k, bool linear) {
    std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) m[a[i]][b[i]] += 1.0;
    const double n = static_cast<double>(a.size());
    std::vector<double> row(k, 0.0), col(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            row[i] += m[i][j] / n;
            col[j] += m[i][j] / n;
        }
    double po = 0.0, pe = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const double w = linear ? 1.0 - std::abs(double(i) - double(j)) / double(k - 1) : (i == j ? 1.0 : 0.0);
            po += w * m[i][j] / n;
            pe += w * row[i] * col[j];
        }
    return (po - pe) / (1.0 - pe);
}

/// Corpus BLEU-4 where every n-gram is a token vector matched by linear scan.
inline double exhaustive_bleu(const std::vector<std::string>& cands, const std::vector<std::string>& refs) {
    using metrics::Tokens;
    double m[4] = {0, 0, 0, 0}, t[4] = {0, 0, 0, 0};
    double cl = 0, rl = 0;
    for (std::size_t p = 0; p < cands.size(); ++p) {
        const auto c = metrics::tokenize(cands[p]);
        const auto r = metrics::tokenize(refs[p]);
        cl += double(c.size());
        rl += double(r.size());
        for (std::size_t n = 1; n <= 4; ++n) {
            auto grams = [n](const Tokens& s) {
                std::vector<Tokens> out;
                for (std::size_t i = 0; i + n <= s.size(); ++i) out.emplace_back(s.begin() + i, s.begin() + i + n);
                return out;
            };
            const auto cg = grams(c), rg = grams(r);
            std::vector<bool> used(rg.size(), false);
            for (const auto& g : cg) {
                t[n - 1] += 1;
                for (std::size_t k = 0; k < rg.size(); ++k)
                    if (!used[k] && rg[k] == g) {
                        used[k] = true;
                        m[n - 1] += 1;
                        break;
                    }
            }
        }
    }
    if (m[0] == 0) return 0.0;
    const bool smooth = m[1] == 0 || m[2] == 0 || m[3] == 0;
    double log_sum = 0;
    for (int n = 0; n < 4; ++n) {
        const double add = (n > 0 && smooth) ? 1.0 : 0.0;
        log_sum += std::log((m[n] + add) / (t[n] + add));
    }
    const double bp = cl >= rl ? 1.0 : std::exp(1.0 - rl / cl);
    return std::exp(log_sum / 4.0) * bp;
}

}  // namespace curev::testing
