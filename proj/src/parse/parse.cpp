#include "curev/parse.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <map>

namespace curev::parse {

namespace {

constexpr std::array<std::string_view, 8> kKeyNames{"REFERENCE_COMMENT", "TYPE",    "NATURE",
                                                    "CIVILITY",          "RELEVANCE", "CLARITY",
                                                    "CONCISENESS",       "RATIONALE"};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string_view ltrim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
        start = nl + 1;
    }
    return out;
}

struct FenceOpen {
    std::size_t length = 0;
    std::string_view info;
};

std::optional<FenceOpen> opening_fence(std::string_view line) {
    std::size_t indent = 0;
    while (indent < line.size() && line[indent] == ' ') ++indent;
    if (indent > 3) return std::nullopt;
    std::size_t run = 0;
    while (indent + run < line.size() && line[indent + run] == '`') ++run;
    if (run < 3) return std::nullopt;
    auto info = trim(line.substr(indent + run));
    if (info.find('`') != std::string_view::npos) return std::nullopt;
    return FenceOpen{run, info};
}

bool closes_fence(std::string_view line, std::size_t length) {
    std::size_t indent = 0;
    while (indent < line.size() && line[indent] == ' ') ++indent;
    if (indent > 3) return false;
    std::size_t run = 0;
    while (indent + run < line.size() && line[indent + run] == '`') ++run;
    return run >= length && trim(line.substr(indent + run)).empty();
}

struct KeyMatch {
    Key key;
    std::string_view rest;
};

// Recognizes "KEY: value", tolerating indentation, "**KEY:**" emphasis and
// "Reference comment" spelled with a space.
std::optional<KeyMatch> match_key(std::string_view line) {
    auto s = ltrim(line);
    bool emphasized = false;
    if (starts_with(s, "**")) {
        s.remove_prefix(2);
        emphasized = true;
    }
    const auto colon = s.find(':');
    if (colon == std::string_view::npos || colon > 32) return std::nullopt;
    auto name = s.substr(0, colon);
    if (emphasized && name.size() >= 2 && name.substr(name.size() - 2) == "**") name.remove_suffix(2);
    name = trim(name);
    std::string normalized;
    for (char c : name) {
        if (c == ' ' || c == '_') {
            normalized += '_';
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
            normalized += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        } else {
            return std::nullopt;
        }
    }
    for (std::size_t k = 0; k < kKeyNames.size(); ++k) {
        if (normalized == kKeyNames[k]) {
            auto rest = s.substr(colon + 1);
            if (emphasized && starts_with(rest, "**")) rest.remove_prefix(2);
            return KeyMatch{static_cast<Key>(k), rest};
        }
    }
    return std::nullopt;
}

bool needs_escape(std::string_view line) {
    return starts_with(line, "\\") || starts_with(ltrim(line), "`") || match_key(line).has_value();
}

using Fields = std::map<Key, std::string>;

Fields read_fields(std::string_view block) {
    Fields fields;
    std::optional<Key> current;
    for (auto line : split_lines(block)) {
        if (auto m = match_key(line)) {
            if (fields.count(m->key))
                throw ParseError(ParseErrorKind::duplicate_field, key_field(m->key), "key given twice");
            current = m->key;
            fields[m->key] = std::string(ltrim(m->rest));
            continue;
        }
        if (!current) continue;  // prose before the first key
        if (starts_with(line, "\\")) line.remove_prefix(1);
        auto& value = fields[*current];
        value += '\n';
        value += line;
    }
    for (auto& [key, value] : fields) value = std::string(trim(value));
    return fields;
}

bool has_key_line(std::string_view text) {
    for (auto line : split_lines(text))
        if (match_key(line)) return true;
    return false;
}

std::string_view select_block(std::string_view raw, std::vector<FencedBlock>& storage) {
    storage = fenced_blocks(raw);
    std::vector<const FencedBlock*> tagged, keyed;
    for (const auto& b : storage) {
        if (iequals(b.info, kJudgmentTag)) tagged.push_back(&b);
        if (has_key_line(b.content)) keyed.push_back(&b);
    }
    if (tagged.size() > 1) throw ParseError(ParseErrorKind::multiple_blocks, "", "more than one judgment block");
    if (tagged.size() == 1) return tagged.front()->content;
    if (keyed.size() > 1) throw ParseError(ParseErrorKind::multiple_blocks, "", "more than one block with judgment keys");
    if (keyed.size() == 1) return keyed.front()->content;
    if (!has_key_line(raw)) throw ParseError(ParseErrorKind::missing_block, "", "no judgment block found");
    return raw;
}

const std::string& require(const Fields& fields, Key key) {
    auto it = fields.find(key);
    if (it == fields.end()) throw ParseError(ParseErrorKind::missing_field, key_field(key), "required key missing");
    return it->second;
}

std::string_view strip_decoration(std::string_view token) {
    constexpr std::string_view decoration = "[](){}\"'*`.";
    token = trim(token);
    while (!token.empty() && decoration.find(token.front()) != std::string_view::npos) token.remove_prefix(1);
    while (!token.empty() && decoration.find(token.back()) != std::string_view::npos) token.remove_suffix(1);
    return trim(token);
}

template <class E>
LabelSet<E> read_labels(const Fields& fields, Key key) {
    const auto& value = require(fields, key);
    LabelSet<E> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        auto end = value.find_first_of(",;|\n", start);
        if (end == std::string::npos) end = value.size();
        auto token = strip_decoration(std::string_view(value).substr(start, end - start));
        start = end + 1;
        if (token.empty()) continue;
        auto label = parse_label<E>(token);
        if (!label)
            throw ParseError(ParseErrorKind::unknown_label, key_field(key),
                             "unknown label '" + std::string(token.substr(0, 64)) + "'");
        out.insert(*label);
    }
    if (out.empty()) throw ParseError(ParseErrorKind::empty_label_set, key_field(key), "no labels given");
    return out;
}

Civility read_civility(const Fields& fields) {
    auto token = strip_decoration(require(fields, Key::civility));
    auto label = parse_label<Civility>(token);
    if (!label)
        throw ParseError(ParseErrorKind::unrecognized_civility, "civility",
                         "expected Civil or Uncivil, got '" + std::string(token.substr(0, 64)) + "'");
    return *label;
}

int read_score(const Fields& fields, Key key) {
    auto text = strip_decoration(require(fields, Key(key)));
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        if (strip_decoration(text.substr(slash + 1)) != "10")
            throw ParseError(ParseErrorKind::invalid_score, key_field(key), "unsupported scale");
        text = trim(text.substr(0, slash));
    }
    bool negative = false;
    if (starts_with(text, "-")) {
        negative = true;
        text.remove_prefix(1);
    }
    const bool digits = !text.empty() && std::all_of(text.begin(), text.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
    });
    if (!digits)
        throw ParseError(ParseErrorKind::invalid_score, key_field(key),
                         "not an integer score: '" + std::string(text.substr(0, 32)) + "'");
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || negative || value < kMinScore || value > kMaxScore)
        throw ParseError(ParseErrorKind::out_of_range, key_field(key),
                         "score " + std::string(negative ? "-" : "") + std::string(text.substr(0, 32)) +
                             " outside 1..10");
    return static_cast<int>(value);
}

std::string escape_value(std::string_view value) {
    std::string out;
    bool first = true;
    for (auto line : split_lines(value)) {
        if (!first) {
            out += '\n';
            if (needs_escape(line)) out += '\\';
        }
        out += line;
        first = false;
    }
    return out;
}

void emit(std::string& out, Key key, std::string_view value) {
    out += key_name(key);
    out += ':';
    if (!value.empty()) {
        out += ' ';
        out += escape_value(value);
    }
    out += '\n';
}

template <class E>
std::string join_labels(const LabelSet<E>& set) {
    std::string out;
    for (const auto& name : set.names()) {
        if (!out.empty()) out += ", ";
        out += name;
    }
    return out;
}

bool strip_pair(std::string_view& s, std::string_view open, std::string_view close) {
    if (s.size() >= open.size() + close.size() && starts_with(s, open) &&
        s.substr(s.size() - close.size()) == close) {
        s = s.substr(open.size(), s.size() - open.size() - close.size());
        return true;
    }
    return false;
}

}  // namespace

std::string_view kind_name(ParseErrorKind kind) {
    switch (kind) {
        case ParseErrorKind::missing_block: return "MissingBlock";
        case ParseErrorKind::multiple_blocks: return "MultipleBlocks";
        case ParseErrorKind::missing_field: return "MissingField";
        case ParseErrorKind::duplicate_field: return "DuplicateField";
        case ParseErrorKind::out_of_range: return "OutOfRange";
        case ParseErrorKind::invalid_score: return "InvalidScore";
        case ParseErrorKind::empty_label_set: return "EmptyLabelSet";
        case ParseErrorKind::unknown_label: return "UnknownLabel";
        case ParseErrorKind::unrecognized_civility: return "UnrecognizedCivility";
        case ParseErrorKind::missing_reformulation: return "MissingReformulation";
    }
    return "ParseError";
}

ParseError::ParseError(ParseErrorKind kind, std::string field, const std::string& detail)
    : Error("parse", std::string(kind_name(kind)) + "(" + field + "): " + detail),
      kind_(kind),
      field_(std::move(field)) {}

std::string_view key_name(Key key) { return kKeyNames[static_cast<std::size_t>(key)]; }

std::string key_field(Key key) {
    std::string out(key_name(key));
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<FencedBlock> fenced_blocks(std::string_view text) {
    std::vector<FencedBlock> blocks;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto open = opening_fence(lines[i]);
        if (!open) continue;
        FencedBlock block;
        block.info = std::string(open->info);
        std::size_t j = i + 1;
        bool first = true;
        for (; j < lines.size() && !closes_fence(lines[j], open->length); ++j) {
            if (!first) block.content += '\n';
            block.content += lines[j];
            first = false;
        }
        blocks.push_back(std::move(block));
        i = j;
    }
    return blocks;
}

std::string fence_for(std::string_view content) {
    std::size_t longest = 0, run = 0;
    for (char c : content) {
        run = c == '`' ? run + 1 : 0;
        longest = std::max(longest, run);
    }
    return std::string(std::max<std::size_t>(3, longest + 1), '`');
}

Judgment parse_judgment(std::string_view raw) {
    std::vector<FencedBlock> storage;
    const auto fields = read_fields(select_block(raw, storage));

    Judgment j;
    j.reference_comment = require(fields, Key::reference_comment);
    if (j.reference_comment.empty())
        throw ParseError(ParseErrorKind::missing_field, "reference_comment", "empty reference comment");
    j.labels.types = read_labels<IssueType>(fields, Key::type);
    j.labels.natures = read_labels<Nature>(fields, Key::nature);
    j.labels.civility = read_civility(fields);
    j.labels.relevance = read_score(fields, Key::relevance);
    j.labels.clarity = read_score(fields, Key::clarity);
    j.labels.conciseness = read_score(fields, Key::conciseness);
    j.rationale = require(fields, Key::rationale);
    return j;
}

PostJudgment parse_post_judgment(std::string_view raw) {
    std::vector<FencedBlock> storage;
    const auto fields = read_fields(select_block(raw, storage));

    PostJudgment p;
    p.natures = read_labels<Nature>(fields, Key::nature);
    p.civility = read_civility(fields);
    p.clarity = read_score(fields, Key::clarity);
    p.conciseness = read_score(fields, Key::conciseness);
    return p;
}

std::string parse_reformulation(std::string_view raw) {
    const auto blocks = fenced_blocks(raw);
    const FencedBlock* tagged = nullptr;
    for (const auto& b : blocks) {
        if (!iequals(b.info, kReformulationTag)) continue;
        if (tagged)
            throw ParseError(ParseErrorKind::multiple_blocks, "reformulation", "more than one reformulated block");
        tagged = &b;
    }
    std::string_view text = tagged ? std::string_view(tagged->content) : raw;
    text = trim(text);
    if (strip_pair(text, "\"", "\"") || strip_pair(text, "'", "'") ||
        strip_pair(text, "“", "”"))
        text = trim(text);
    if (text.empty())
        throw ParseError(ParseErrorKind::missing_reformulation, "reformulation", "no reformulated comment");
    return std::string(text);
}

std::string serialize_judgment(const Judgment& j) {
    std::string out = "```";
    out += kJudgmentTag;
    out += '\n';
    emit(out, Key::reference_comment, j.reference_comment);
    emit(out, Key::type, join_labels(j.labels.types));
    emit(out, Key::nature, join_labels(j.labels.natures));
    emit(out, Key::civility, label_name(j.labels.civility));
    emit(out, Key::relevance, std::to_string(j.labels.relevance));
    emit(out, Key::clarity, std::to_string(j.labels.clarity));
    emit(out, Key::conciseness, std::to_string(j.labels.conciseness));
    emit(out, Key::rationale, j.rationale);
    out += "```\n";
    return out;
}

std::string serialize_post_judgment(const PostJudgment& p, std::string_view rationale) {
    std::string out = "```";
    out += kJudgmentTag;
    out += '\n';
    emit(out, Key::nature, join_labels(p.natures));
    emit(out, Key::civility, label_name(p.civility));
    emit(out, Key::clarity, std::to_string(p.clarity));
    emit(out, Key::conciseness, std::to_string(p.conciseness));
    emit(out, Key::rationale, rationale);
    out += "```\n";
    return out;
}

std::string serialize_reformulation(std::string_view text) {
    const auto fence = fence_for(text);
    std::string out = fence;
    out += kReformulationTag;
    out += '\n';
    out += text;
    out += '\n';
    out += fence;
    out += '\n';
    return out;
}

std::string judgment_format_instruction(bool include_relevance) {
    std::string out =
        "Answer with exactly one fenced block tagged `judgment`, containing one `KEY: value` line per "
        "key below and nothing else. TYPE and NATURE take a comma-separated list of labels. Scores are "
        "whole numbers from 1 to 10. Multi-line values continue on the following lines.\n\n"
        "```judgment\n"
        "REFERENCE_COMMENT: <the review comment you generated>\n"
        "TYPE: <Refactoring, Bugfix, Testing, Logging, Documentation, Other>\n"
        "NATURE: <Descriptive, Prescriptive, Clarification, Other>\n"
        "CIVILITY: <Civil or Uncivil>\n";
    if (include_relevance) out += "RELEVANCE: <1-10>\n";
    out +=
        "CLARITY: <1-10>\n"
        "CONCISENESS: <1-10>\n"
        "RATIONALE: <a short justification of each label and score>\n"
        "```\n\n"
        "Example:\n\n"
        "```judgment\n"
        "REFERENCE_COMMENT: Consider checking `buf` for NULL before the copy; malloc can fail here.\n"
        "TYPE: Bugfix\n"
        "NATURE: Prescriptive\n"
        "CIVILITY: Civil\n";
    if (include_relevance) out += "RELEVANCE: 8\n";
    out +=
        "CLARITY: 7\n"
        "CONCISENESS: 9\n"
        "RATIONALE: The comment points at a real defect in the change and asks for a concrete fix.\n"
        "```";
    return out;
}

std::string reformulation_format_instruction() {
    return "Answer with exactly one fenced block tagged `reformulated` that contains only the "
           "reformulated review comment.\n\n"
           "Example:\n\n"
           "```reformulated\n"
           "Consider renaming `tmp` to `retry_count` so its purpose is clear.\n"
           "```";
}

}  // namespace curev::parse
