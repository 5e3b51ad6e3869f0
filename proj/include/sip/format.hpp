#pragma once

#include <string>

namespace sip {

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double v);

}  // namespace sip
