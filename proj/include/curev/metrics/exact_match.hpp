#pragma once

#include <span>
#include <string>
#include <string_view>

#include "curev/metrics/bleu.hpp"

namespace curev::metrics {

enum class MatchMode {
    normalized,  // CRLF/CR -> LF, trailing whitespace stripped per line
    raw,         // byte-exact
};

/// Line endings become LF and each line loses its trailing spaces/tabs.
std::string normalize_for_match(std::string_view text);

/// Number of positions where candidate and reference are equal under `mode`.
/// Throws MetricError on length mismatch.
std::size_t exact_match(std::span<const std::string> candidates, std::span<const std::string> references,
                        MatchMode mode = MatchMode::normalized, Execution exec = Execution::serial);

}  // namespace curev::metrics
