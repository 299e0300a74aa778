#include "whamm/support/glob.hpp"

namespace whamm {

bool glob_match(std::string_view pattern, std::string_view text) {
    // Iterative matcher with single-star backtracking.
    size_t p = 0, t = 0;
    size_t star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

bool glob_alt_match(std::string_view pattern, std::string_view text) {
    size_t start = 0;
    while (start <= pattern.size()) {
        size_t bar = pattern.find('|', start);
        std::string_view piece = pattern.substr(start, bar == std::string_view::npos
                                                           ? std::string_view::npos
                                                           : bar - start);
        if (!piece.empty() && glob_match(piece, text)) return true;
        if (bar == std::string_view::npos) break;
        start = bar + 1;
    }
    return false;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(text.substr(start));
            return out;
        }
        out.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace whamm
