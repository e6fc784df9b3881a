#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kht {

// full command-line front end; args excludes argv[0].
// returns the process exit code: 0 ok, 1 bad input, 2 broken invariant.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace kht
