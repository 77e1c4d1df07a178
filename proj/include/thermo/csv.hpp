#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace thermo::csv {

// Shortest round-trip decimal form used for all numeric CSV output, so that
// identical doubles serialize to identical bytes.
inline std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_line(const std::string& line);

} // namespace thermo::csv
