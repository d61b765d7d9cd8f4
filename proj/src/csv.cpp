// SPDX-License-Identifier: Apache-2.0

#include "everkin/csv.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "everkin/errors.hpp"

namespace everkin::csv {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;  // 32 bytes always suffice for shortest form
    return std::string(buf, ptr);
}

double parse_double(std::string_view field, int line_no) {
    if (field.empty()) throw ParseError("empty numeric field", line_no);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError("malformed number '" + std::string(field) + "'", line_no);
    if (!std::isfinite(v))
        throw ParseError("non-finite value '" + std::string(field) + "'", line_no);
    return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace everkin::csv
