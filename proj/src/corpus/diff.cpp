#include "curev/diff.hpp"

#include <array>
#include <charconv>

namespace curev::corpus {

namespace {

std::vector<std::string_view> split_lines(std::string_view text, bool& trailing_newline) {
    std::vector<std::string_view> lines;
    trailing_newline = !text.empty() && text.back() == '\n';
    if (trailing_newline) text.remove_suffix(1);
    std::size_t start = 0;
    while (true) {
        const auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

// Lines git and diff(1) emit between files.
bool is_file_header(std::string_view line) {
    static constexpr std::array<std::string_view, 13> prefixes{
        "diff ",        "--- ",          "+++ ",         "index ",          "new file mode",
        "deleted file", "similarity ",   "dissimilarity", "rename ",         "copy ",
        "old mode",     "new mode",      "Binary files"};
    for (auto p : prefixes)
        if (starts_with(line, p)) return true;
    return false;
}

bool read_number(std::string_view& s, std::size_t& out) {
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr == first) return false;
    s.remove_prefix(static_cast<std::size_t>(ptr - first));
    return true;
}

// "-a,b" or "-a" (count defaults to 1)
bool read_range(std::string_view& s, char sign, std::size_t& start, std::size_t& count) {
    if (s.empty() || s.front() != sign) return false;
    s.remove_prefix(1);
    if (!read_number(s, start)) return false;
    count = 1;
    if (!s.empty() && s.front() == ',') {
        s.remove_prefix(1);
        if (!read_number(s, count)) return false;
    }
    return true;
}

bool parse_header(std::string_view line, DiffHunk& hunk) {
    if (!starts_with(line, "@@ ")) return false;
    line.remove_prefix(3);
    if (!read_range(line, '-', hunk.old_start, hunk.old_count)) return false;
    if (!starts_with(line, " ")) return false;
    line.remove_prefix(1);
    if (!read_range(line, '+', hunk.new_start, hunk.new_count)) return false;
    return starts_with(line, " @@");
}

std::string mismatch(std::size_t index) { return "count mismatch in hunk " + std::to_string(index); }

}  // namespace

UnifiedDiff parse_unified_diff(std::string_view text) {
    if (text.empty()) throw DiffError(std::nullopt, "empty diff");

    UnifiedDiff diff;
    const auto lines = split_lines(text, diff.trailing_newline);

    std::vector<std::string> pending_header;
    std::size_t i = 0;
    while (i < lines.size()) {
        const auto line = lines[i];
        if (!starts_with(line, "@@")) {
            if (diff.hunks.empty() || is_file_header(line)) {
                pending_header.emplace_back(line);
                ++i;
                continue;
            }
            throw DiffError(diff.hunks.size() - 1, mismatch(diff.hunks.size() - 1));
        }

        const std::size_t index = diff.hunks.size();
        DiffHunk hunk;
        if (!parse_header(line, hunk))
            throw DiffError(index, "malformed hunk header in hunk " + std::to_string(index));
        hunk.header = std::string(line);
        hunk.file_header = std::move(pending_header);
        pending_header.clear();
        ++i;

        std::size_t old_left = hunk.old_count;
        std::size_t new_left = hunk.new_count;
        while (i < lines.size() && (old_left > 0 || new_left > 0)) {
            const auto body = lines[i];
            DiffLine dl;
            if (body.empty()) {
                dl.tag = LineTag::context;
                dl.bare = true;
            } else if (body.front() == ' ') {
                dl.tag = LineTag::context;
            } else if (body.front() == '-') {
                dl.tag = LineTag::del;
            } else if (body.front() == '+') {
                dl.tag = LineTag::add;
            } else if (body.front() == '\\' && !hunk.lines.empty()) {
                hunk.lines.back().eof_marker = std::string(body);
                ++i;
                continue;
            } else {
                break;
            }
            const bool uses_old = dl.tag != LineTag::add;
            const bool uses_new = dl.tag != LineTag::del;
            if ((uses_old && old_left == 0) || (uses_new && new_left == 0)) break;
            if (uses_old) --old_left;
            if (uses_new) --new_left;
            if (!dl.bare) dl.text = std::string(body.substr(1));
            hunk.lines.push_back(std::move(dl));
            ++i;
        }
        if (old_left != 0 || new_left != 0) throw DiffError(index, mismatch(index));
        // Markers may trail the last counted line.
        while (i < lines.size() && starts_with(lines[i], "\\") && !hunk.lines.empty()) {
            hunk.lines.back().eof_marker = std::string(lines[i]);
            ++i;
        }
        diff.hunks.push_back(std::move(hunk));
    }

    if (diff.hunks.empty()) throw DiffError(std::nullopt, "no hunk header found");
    if (!pending_header.empty()) {
        const auto last = diff.hunks.size() - 1;
        throw DiffError(last, "file header without hunk after hunk " + std::to_string(last));
    }
    return diff;
}

std::string serialize(const UnifiedDiff& diff) {
    std::string out;
    bool first = true;
    auto emit = [&](std::string_view line) {
        if (!first) out += '\n';
        out += line;
        first = false;
    };
    for (const auto& hunk : diff.hunks) {
        for (const auto& h : hunk.file_header) emit(h);
        if (hunk.header.empty()) {
            emit("@@ -" + std::to_string(hunk.old_start) + "," + std::to_string(hunk.old_count) +
                 " +" + std::to_string(hunk.new_start) + "," + std::to_string(hunk.new_count) + " @@");
        } else {
            emit(hunk.header);
        }
        for (const auto& line : hunk.lines) {
            if (line.bare) {
                emit("");
            } else {
                const char tag = line.tag == LineTag::add ? '+' : line.tag == LineTag::del ? '-' : ' ';
                emit(std::string(1, tag) + line.text);
            }
            if (line.eof_marker) emit(*line.eof_marker);
        }
    }
    if (diff.trailing_newline) out += '\n';
    return out;
}

bool counts_consistent(const DiffHunk& hunk) {
    std::size_t ctx = 0, add = 0, del = 0;
    for (const auto& l : hunk.lines) {
        switch (l.tag) {
            case LineTag::context: ++ctx; break;
            case LineTag::add: ++add; break;
            case LineTag::del: ++del; break;
        }
    }
    return hunk.old_count == ctx + del && hunk.new_count == ctx + add;
}

std::string new_side(const UnifiedDiff& diff) {
    std::string out;
    for (const auto& hunk : diff.hunks)
        for (const auto& line : hunk.lines)
            if (line.tag != LineTag::del) {
                out += line.text;
                out += '\n';
            }
    return out;
}

}  // namespace curev::corpus
