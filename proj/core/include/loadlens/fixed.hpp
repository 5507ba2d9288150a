#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace loadlens {

/// Energy values are carried as integer thousandths of a kWh ("millesimals").
/// Meter resolution is 0.001 kWh, so every observable value is exactly
/// representable and sums/merges are bit-reproducible regardless of sharding.
using Milli = std::int64_t;

inline constexpr Milli kMilliPerKwh = 1000;

/// Per-hour grid connection cap: present values must lie in (0, 29.0] kWh.
inline constexpr std::int32_t kValueCapMilli = 29000;

inline constexpr double kwh_from_milli(Milli m) {
  return static_cast<double>(m) / 1000.0;
}

/// Exact parse of a decimal with at most 3 fractional digits into millesimals.
/// Accepts an optional leading '-'. Returns nullopt for anything else
/// (empty, stray characters, >3 fractional digits, overflow).
std::optional<Milli> parse_milli(std::string_view text);

/// Fixed three-decimal rendering, e.g. 512 -> "0.512". Round-trips through
/// parse_milli bit-for-bit.
std::string format_milli(Milli m);
void append_milli(std::string& out, Milli m);

}  // namespace loadlens
