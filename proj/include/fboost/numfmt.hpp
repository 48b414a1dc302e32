#pragma once

// Shortest round-trip text for doubles, and the matching strict parser.

#include <optional>
#include <string>
#include <string_view>

namespace fboost {

// "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double x);

// Whole-token parse (surrounding blanks ignored); nullopt on any leftover text.
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace fboost
