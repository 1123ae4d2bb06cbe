#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curev/error.hpp"

namespace curev::corpus {

enum class LineTag { context, add, del };

struct DiffLine {
    LineTag tag = LineTag::context;
    std::string text;  // without the leading tag character
    // Empty context line that appeared with its leading space stripped.
    bool bare = false;
    // "\ No newline at end of file" style marker following this line, verbatim.
    std::optional<std::string> eof_marker;

    bool operator==(const DiffLine&) const = default;
};

struct DiffHunk {
    std::size_t old_start = 0;
    std::size_t old_count = 0;
    std::size_t new_start = 0;
    std::size_t new_count = 0;
    // Raw "@@ ... @@ section" line. Synthesized from the counts when empty.
    std::string header;
    // File-level header lines ("diff --git", "--- a/x", "+++ b/x") that
    // preceded this hunk.
    std::vector<std::string> file_header;
    std::vector<DiffLine> lines;

    bool operator==(const DiffHunk&) const = default;
};

struct UnifiedDiff {
    std::vector<DiffHunk> hunks;
    bool trailing_newline = false;
};

class DiffError : public Error {
public:
    DiffError(std::optional<std::size_t> hunk, const std::string& what)
        : Error("diff", what), hunk_(hunk) {}
    std::optional<std::size_t> hunk_index() const noexcept { return hunk_; }

private:
    std::optional<std::size_t> hunk_;
};

/// Parses unified-diff text into hunks. Every hunk satisfies
/// old_count = #context + #del and new_count = #context + #add.
/// Throws DiffError on an empty input, a malformed header or a count mismatch
/// ("count mismatch in hunk N").
UnifiedDiff parse_unified_diff(std::string_view text);

/// Inverse of parse_unified_diff: reproduces the parsed text byte for byte.
std::string serialize(const UnifiedDiff& diff);

/// True when the hunk's counts agree with its tagged lines.
bool counts_consistent(const DiffHunk& hunk);

/// Post-change view of the diff: context and added lines, one per line.
std::string new_side(const UnifiedDiff& diff);

}  // namespace curev::corpus
