#include "bhp/date.hpp"

#include <cstdio>

#include "bhp/errors.hpp"

namespace bhp {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

Date parse_date(std::string_view text, std::string_view format) {
  std::string_view ys, ms, ds;
  if (format == "%Y-%m-%d") {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
      throw DataError("malformed date '" + std::string(text) + "', expected YYYY-MM-DD");
    }
    ys = text.substr(0, 4);
    ms = text.substr(5, 2);
    ds = text.substr(8, 2);
  } else if (format == "%Y%m%d") {
    if (text.size() != 8) {
      throw DataError("malformed date '" + std::string(text) + "', expected YYYYMMDD");
    }
    ys = text.substr(0, 4);
    ms = text.substr(4, 2);
    ds = text.substr(6, 2);
  } else {
    throw InvalidArgument("unsupported date format '" + std::string(format) + "'");
  }
  if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds)) {
    throw DataError("malformed date '" + std::string(text) + "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{to_int(ys)},
                                        std::chrono::month{static_cast<unsigned>(to_int(ms))},
                                        std::chrono::day{static_cast<unsigned>(to_int(ds))}};
  if (!ymd.ok()) throw DataError("nonexistent date '" + std::string(text) + "'");
  return Date{std::chrono::sys_days{ymd}};
}

std::string to_string(const Date& date) {
  const std::chrono::year_month_day ymd{date.days};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Date next_weekday(const Date& date) {
  auto d = date.days + std::chrono::days{1};
  while (std::chrono::weekday{d} == std::chrono::Saturday ||
         std::chrono::weekday{d} == std::chrono::Sunday) {
    d += std::chrono::days{1};
  }
  return Date{d};
}

}  // namespace bhp
