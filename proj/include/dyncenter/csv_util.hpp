#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <fmt/format.h>

namespace dyncenter {

/// Quotes a CSV field when it contains separators, quotes or edge whitespace.
inline std::string csv_escape(std::string_view s) {
    const bool plain = s.find_first_of(",\"\n\r") == std::string_view::npos &&
                       (s.empty() || (s.front() != ' ' && s.back() != ' '));
    if (plain) return std::string(s);
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

/// Six-decimal rendering used by every CSV report; missing values print as NA.
inline std::string csv_number(std::optional<double> v) {
    if (!v) return "NA";
    return fmt::format("{:.6f}", *v);
}

}  // namespace dyncenter
