#pragma once

#include <string>

namespace modeswitch {

/// Shortest decimal text that reads back to the same double.
std::string format_real(double value);

}  // namespace modeswitch
