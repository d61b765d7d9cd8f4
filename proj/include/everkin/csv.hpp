// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace everkin::csv {

// Shortest representation that parses back to exactly the same double.
// All CSV output goes through this so files are deterministic and
// re-emission after parsing is byte-identical.
std::string format_double(double v);

// Strict full-token parse; throws ParseError (with the given line number)
// on trailing garbage, empty fields, or non-finite values.
double parse_double(std::string_view field, int line_no);

std::vector<std::string_view> split_fields(std::string_view line);

}  // namespace everkin::csv
