#pragma once

#include <ostream>

namespace mixadc::tools {

/// Prints one PASS/FAIL line per check; true if all pass.
bool run_selftest(std::ostream& out);

}  // namespace mixadc::tools
