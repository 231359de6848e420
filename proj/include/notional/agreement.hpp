#pragma once

#include <optional>
#include <string_view>

namespace notional {

/// Class labels; strict is the majority class and index 0 everywhere.
enum class Agreement : unsigned char { strict = 0, notional = 1 };

inline std::string_view to_string(Agreement a) { return a == Agreement::strict ? "strict" : "notional"; }

inline std::optional<Agreement> parse_agreement(std::string_view s) {
  if (s == "strict") return Agreement::strict;
  if (s == "notional") return Agreement::notional;
  return std::nullopt;
}

}  // namespace notional
