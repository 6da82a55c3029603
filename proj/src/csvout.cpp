#include "aggsamp/csvout.hpp"

#include <charconv>
#include <stdexcept>

namespace aggsamp {

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  if (result.ec != std::errc{})
    throw std::runtime_error("cannot format double");
  return std::string(buf, result.ptr);
}

}  // namespace aggsamp
