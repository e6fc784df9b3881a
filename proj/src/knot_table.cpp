#include "kht/knot_table.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "kht/errors.hpp"

namespace kht {

static const char* table_text =
#include "knot_table_data.inc"
    ;

static std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return (char)std::tolower(c); });
  return s;
}

const std::vector<std::pair<std::string, std::string>>& knot_table() {
  static const std::vector<std::pair<std::string, std::string>> tbl = [] {
    std::vector<std::pair<std::string, std::string>> v;
    std::istringstream in(table_text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      auto comma = line.find(',');
      KHT_ASSERT(comma != std::string::npos, "bad knot table line: " + line);
      v.emplace_back(line.substr(0, comma), line.substr(comma + 1));
    }
    return v;
  }();
  return tbl;
}

const std::string& lookup_knot(const std::string& name) {
  std::string key = lower(name);
  for (auto& [n, pd] : knot_table())
    if (lower(n) == key) return pd;
  fail(errc::unknown_name, "no built-in knot named '" + name + "'");
}

bool is_known_knot(const std::string& name) {
  std::string key = lower(name);
  for (auto& [n, pd] : knot_table())
    if (lower(n) == key) return true;
  return false;
}

}  // namespace kht
