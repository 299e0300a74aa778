#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace whamm {

// `*`-glob match; `*` matches any run of characters (including none).
bool glob_match(std::string_view pattern, std::string_view text);

// `|`-separated alternation of globs; empty pattern matches nothing.
bool glob_alt_match(std::string_view pattern, std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);

}  // namespace whamm
