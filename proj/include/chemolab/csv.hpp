#pragma once

#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace chemolab::csv {

/// Locale-independent, platform-stable rendering of a double.
inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline void header(std::ostream& out, const std::vector<std::string>& columns) {
    for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << columns[k];
    out << '\n';
}

inline void row(std::ostream& out, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        out << (first ? "" : ",") << num(v);
        first = false;
    }
    out << '\n';
}

inline void row(std::ostream& out, const std::vector<double>& values) {
    for (std::size_t k = 0; k < values.size(); ++k) out << (k ? "," : "") << num(values[k]);
    out << '\n';
}

}  // namespace chemolab::csv
