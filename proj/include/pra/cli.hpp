#pragma once

#include <string>
#include <vector>

namespace pra {

/// Toolkit entry point; args excludes the program name.
/// Exit codes: 0 success, 1 infeasible, 2 usage or data error.
int cli(const std::vector<std::string>& args);

}  // namespace pra
