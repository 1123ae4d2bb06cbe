#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curev/error.hpp"
#include "curev/labels.hpp"

namespace curev::parse {

enum class ParseErrorKind {
    missing_block,      // no judgment block and no recognizable key lines
    multiple_blocks,    // more than one candidate block
    missing_field,      // required key absent or empty
    duplicate_field,    // key given twice
    out_of_range,       // score outside 1..10
    invalid_score,      // not an integer ("7.5", "high")
    empty_label_set,    // TYPE/NATURE with no labels
    unknown_label,      // token outside the label space
    unrecognized_civility,
    missing_reformulation,
};

std::string_view kind_name(ParseErrorKind kind);

/// Typed parse failure. `field()` names the offending key in lowercase
/// ("relevance", "type"); it is empty for block-level errors. Identical input
/// always produces an identical error.
class ParseError : public Error {
public:
    ParseError(ParseErrorKind kind, std::string field, const std::string& detail);

    ParseErrorKind kind() const noexcept { return kind_; }
    const std::string& field() const noexcept { return field_; }

private:
    ParseErrorKind kind_;
    std::string field_;
};

/// Keys of the judgment block, in canonical order.
enum class Key { reference_comment, type, nature, civility, relevance, clarity, conciseness, rationale };

std::string_view key_name(Key key);   // "REFERENCE_COMMENT"
std::string key_field(Key key);       // "reference_comment"

/// Info string of the fenced block carrying a judgment.
inline constexpr std::string_view kJudgmentTag = "judgment";
/// Info string of the fenced block carrying a reformulated comment.
inline constexpr std::string_view kReformulationTag = "reformulated";

/// Parses a raw judge completion. Prose outside the block is ignored, label
/// tokens are matched case-insensitively, and scores must be integers in 1..10.
/// Throws ParseError.
Judgment parse_judgment(std::string_view raw);

/// Parses the re-evaluation of a reformulated comment. RELEVANCE, TYPE,
/// REFERENCE_COMMENT and RATIONALE are accepted and discarded.
PostJudgment parse_post_judgment(std::string_view raw);

/// Extracts the reformulated comment: the single `reformulated` block if there
/// is one, otherwise the whole completion. Surrounding quotes are stripped.
/// Throws ParseError(missing_reformulation) when nothing remains.
std::string parse_reformulation(std::string_view raw);

/// Canonical serializer; parse_judgment(serialize_judgment(j)) == j for every
/// judgment whose texts carry no leading or trailing whitespace.
std::string serialize_judgment(const Judgment& judgment);
std::string serialize_post_judgment(const PostJudgment& post, std::string_view rationale = {});
std::string serialize_reformulation(std::string_view text);

/// Output-format instruction embedded in the evaluation prompt.
std::string judgment_format_instruction(bool include_relevance);
std::string reformulation_format_instruction();

/// Shortest backtick fence that cannot collide with `content`.
std::string fence_for(std::string_view content);

struct FencedBlock {
    std::string info;     // info string after the opening fence, trimmed
    std::string content;  // lines between the fences, joined with '\n'
};

/// All fenced blocks (``` style, up to three spaces of indentation).
/// An unterminated block extends to the end of the text.
std::vector<FencedBlock> fenced_blocks(std::string_view text);

}  // namespace curev::parse
