#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace curev::metrics {

using Tokens = std::vector<std::string>;

/// Splits text into identifier/number runs and single punctuation characters;
/// whitespace only separates. Used for both natural-language and code BLEU.
Tokens tokenize(std::string_view text);

}  // namespace curev::metrics
