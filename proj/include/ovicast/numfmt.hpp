#pragma once

#include <string>
#include <string_view>

namespace ovicast {

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);

/// Strict parse of a full string as a double; false on trailing garbage.
bool parse_double(std::string_view text, double& out);

bool parse_int(std::string_view text, long long& out);

std::string_view trim(std::string_view s);

}  // namespace ovicast
