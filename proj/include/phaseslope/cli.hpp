#pragma once

#include <iosfwd>

namespace phaseslope::cli {

/// Exit codes: 0 success, 1 invalid input or arguments, 2 degenerate data.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace phaseslope::cli
