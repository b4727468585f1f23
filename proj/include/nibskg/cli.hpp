#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nibskg {

// Exit codes: 0 success, 1 completed with validation violations,
// 2 usage/parse/config error, 3 I/O error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace nibskg
