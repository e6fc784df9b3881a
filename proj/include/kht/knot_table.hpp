#pragma once
#include <string>
#include <utility>
#include <vector>

namespace kht {

// built-in name table (prime knots through 8 crossings plus the unknot),
// shipped as data/knot_table.txt lines of "name,pdcode"
const std::vector<std::pair<std::string, std::string>>& knot_table();

// case-insensitive name lookup; throws UnknownName
const std::string& lookup_knot(const std::string& name);

bool is_known_knot(const std::string& name);

}  // namespace kht
