#include "curev/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "curev/error.hpp"

namespace curev::jsonl {

std::vector<Line> read_lines(std::istream& in) {
    std::vector<Line> lines;
    std::string text;
    std::size_t number = 0;
    while (std::getline(in, text)) {
        ++number;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (text.find_first_not_of(" \t") == std::string::npos) continue;
        lines.push_back({number, std::move(text)});
    }
    if (in.bad()) throw IoError("read failure after line " + std::to_string(number));
    return lines;
}

std::vector<Line> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_lines(in);
}

std::vector<json> read(const std::filesystem::path& path) {
    std::vector<json> out;
    for (auto& line : read_lines(path)) {
        try {
            out.push_back(json::parse(line.text));
        } catch (const json::parse_error& e) {
            throw IoError(path.string() + ":" + std::to_string(line.line_number) +
                          ": invalid JSON: " + e.what());
        }
    }
    return out;
}

std::string dump_line(const json& value) {
    // Replace invalid UTF-8 instead of throwing mid-write.
    return value.dump(-1, ' ', false, json::error_handler_t::replace);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void write(const std::filesystem::path& path, const std::vector<json>& records) {
    std::string text;
    for (const auto& r : records) {
        text += dump_line(r);
        text += '\n';
    }
    write_text(path, text);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace curev::jsonl
