#pragma once

#include <string>

namespace eciou {

// printf-style "%.<digits>g"; negative zero prints as "0".
std::string format_sig(double value, int digits = 6);

// printf-style "%.<decimals>f".
std::string format_fixed(double value, int decimals = 6);

// Rounds to `digits` significant digits, as format_sig would print it.
double round_sig(double value, int digits = 6);

}  // namespace eciou
