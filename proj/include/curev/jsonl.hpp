#pragma once

#include <filesystem>
#include <functional>
#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

namespace curev::jsonl {

using nlohmann::json;

/// One physical line of a JSON Lines stream. `line_number` is 1-based.
struct Line {
    std::size_t line_number = 0;
    std::string text;
};

/// Splits a stream into non-blank lines. A trailing CR is dropped so that
/// CRLF input reads the same as LF input.
std::vector<Line> read_lines(std::istream& in);
std::vector<Line> read_lines(const std::filesystem::path& path);

/// Parses every non-blank line; throws IoError naming the first bad line.
std::vector<json> read(const std::filesystem::path& path);

std::string dump_line(const json& value);

/// Writes `records` as LF-terminated JSON Lines through a temp file and a
/// rename, so readers never see a half-written output.
void write(const std::filesystem::path& path, const std::vector<json>& records);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace curev::jsonl
