#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace bhp {

/// A calendar trading day.
struct Date {
  std::chrono::sys_days days{};

  friend auto operator<=>(const Date&, const Date&) = default;
};

/// Strict parse. Supported formats: "%Y-%m-%d" (ISO-8601) and "%Y%m%d".
/// Throws InvalidArgument for an unsupported format and DataError for text
/// that does not match it or names a nonexistent day.
Date parse_date(std::string_view text, std::string_view format = "%Y-%m-%d");

/// ISO-8601 rendering, YYYY-MM-DD.
std::string to_string(const Date& date);

/// Next Monday-to-Friday day after `date`.
Date next_weekday(const Date& date);

}  // namespace bhp
