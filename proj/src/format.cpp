#include "eciou/format.hpp"

#include <cstdio>
#include <cstdlib>

namespace eciou {

std::string format_sig(double value, int digits) {
  if (value == 0.0) value = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

std::string format_fixed(double value, int decimals) {
  if (value == 0.0) value = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

double round_sig(double value, int digits) {
  return std::strtod(format_sig(value, digits).c_str(), nullptr);
}

}  // namespace eciou
