#pragma once

#include <cstdint>
#include <string>

namespace aggsamp {

// Shortest round-trip decimal form of a double, locale-independent, identical
// across runs (std::to_chars).  Keeps CSV output byte-stable.
std::string format_double(double v);

}  // namespace aggsamp
