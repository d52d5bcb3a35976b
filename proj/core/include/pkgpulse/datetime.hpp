#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace pkgpulse {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

/// Parses the changelog trailer date, e.g. "Tue, 14 Mar 2017 12:00:00 +0100".
/// The weekday is optional and not cross-checked. Zones: numeric offsets,
/// UT/UTC/GMT/Z. Returns nullopt on any malformation; never throws.
std::optional<Timestamp> parse_rfc2822(std::string_view text) noexcept;

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.frac]]" with an optional
/// "Z" or "+HH:MM"/"+HHMM" suffix. A space may replace the 'T'.
std::optional<Timestamp> parse_iso8601(std::string_view text) noexcept;

std::optional<Date> parse_date(std::string_view text) noexcept;

std::string format_iso8601(Timestamp ts);
std::string format_date(Date d);

}  // namespace pkgpulse
