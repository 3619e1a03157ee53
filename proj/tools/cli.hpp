#pragma once

#include <iosfwd>

namespace dualfuel {

inline constexpr const char* kToolName = "dualfuel";
inline constexpr const char* kToolVersion = "1.0.0";

/// Exit codes: 0 ok, 2 configuration or usage error, 3 simulation failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace dualfuel
