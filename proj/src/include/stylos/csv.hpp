#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stylos::csv {

using Row = std::vector<std::string>;

// RFC-4180-ish: quoted fields, doubled quotes, CRLF or LF line ends.
std::vector<Row> parse(std::string_view text);

std::string escape(std::string_view field);
std::string format_row(const Row& row);

}  // namespace stylos::csv
