#include "curev/metrics/exact_match.hpp"

#include <vector>

namespace curev::metrics {

std::string normalize_for_match(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t line_start = 0;
    auto strip_line = [&] {
        while (out.size() > line_start && (out.back() == ' ' || out.back() == '\t' || out.back() == '\f' ||
                                           out.back() == '\v'))
            out.pop_back();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
            c = '\n';
        }
        if (c == '\n') {
            strip_line();
            out += '\n';
            line_start = out.size();
        } else {
            out += c;
        }
    }
    strip_line();
    return out;
}

std::size_t exact_match(std::span<const std::string> candidates, std::span<const std::string> references,
                        MatchMode mode, Execution exec) {
    if (candidates.size() != references.size()) throw MetricError("candidates and references differ in length");
    auto equal = [&](std::size_t i) {
        if (mode == MatchMode::raw) return candidates[i] == references[i];
        return normalize_for_match(candidates[i]) == normalize_for_match(references[i]);
    };
    std::size_t count = 0;
    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < candidates.size(); ++i) count += equal(i) ? 1 : 0;
        return count;
    }
    std::vector<unsigned char> hit(candidates.size(), 0);
    const auto n = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) hit[static_cast<std::size_t>(i)] = equal(static_cast<std::size_t>(i));
    for (auto h : hit) count += h;
    return count;
}

}  // namespace curev::metrics
