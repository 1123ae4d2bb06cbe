#include "curev/metrics/tokenize.hpp"

namespace curev::metrics {

namespace {

bool word_char(unsigned char c) {
    // Bytes >= 0x80 belong to UTF-8 sequences and stay inside words.
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c >= 0x80;
}

bool space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

Tokens tokenize(std::string_view text) {
    Tokens out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (space(c)) {
            ++i;
        } else if (word_char(c)) {
            const auto start = i;
            while (i < text.size() && word_char(static_cast<unsigned char>(text[i]))) ++i;
            out.emplace_back(text.substr(start, i - start));
        } else {
            out.emplace_back(1, text[i++]);
        }
    }
    return out;
}

}  // namespace curev::metrics
