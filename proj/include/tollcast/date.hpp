#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "tollcast/error.hpp"

namespace tollcast {

namespace detail {

// Days between 1970-01-01 and y-m-d in the proleptic Gregorian calendar.
// Standard era-based civil-date conversion.
constexpr std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 +
         static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
  int year;
  int month;
  int day;
};

constexpr Civil civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {y + (m <= 2), static_cast<int>(m), static_cast<int>(d)};
}

constexpr bool is_leap_year(int y) {
  return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

constexpr int days_in_month(int y, int m) {
  constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap_year(y)) return 29;
  return lengths[m - 1];
}

}  // namespace detail

// Calendar date stored as a day count since 1970-01-01. Cheap to copy and
// compare; day arithmetic is plain integer arithmetic.
class Date {
 public:
  Date() : days_(0) {}

  Date(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1 ||
        day > detail::days_in_month(year, month)) {
      throw parse_error("invalid calendar date " + std::to_string(year) + "-" +
                        std::to_string(month) + "-" + std::to_string(day));
    }
    days_ = detail::days_from_civil(year, month, day);
  }

  static Date from_day_number(std::int64_t days) {
    Date d;
    d.days_ = days;
    return d;
  }

  // Strict ISO "YYYY-MM-DD".
  static Date parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
      throw parse_error("malformed date '" + std::string(text) +
                        "' (expected YYYY-MM-DD)");
    }
    auto digits = [&](int from, int to) {
      int v = 0;
      for (int i = from; i < to; ++i) {
        const char c = text[static_cast<std::size_t>(i)];
        if (c < '0' || c > '9') {
          throw parse_error("malformed date '" + std::string(text) + "'");
        }
        v = v * 10 + (c - '0');
      }
      return v;
    };
    return Date(digits(0, 4), digits(5, 7), digits(8, 10));
  }

  std::int64_t day_number() const { return days_; }

  int year() const { return detail::civil_from_days(days_).year; }
  int month() const { return detail::civil_from_days(days_).month; }
  int day() const { return detail::civil_from_days(days_).day; }

  // Monday = 0 .. Sunday = 6. 1970-01-01 was a Thursday.
  int day_of_week() const {
    return static_cast<int>(((days_ % 7) + 7 + 3) % 7);
  }

  // 1-based day within the year, 1..366.
  int day_of_year() const {
    const auto c = detail::civil_from_days(days_);
    return static_cast<int>(days_ - detail::days_from_civil(c.year, 1, 1)) + 1;
  }

  bool is_weekend() const { return day_of_week() >= 5; }

  // ISO-8601 week number, 1..53. Week 1 contains the year's first Thursday.
  int iso_week() const {
    const int dow_iso = day_of_week() + 1;  // Monday = 1 .. Sunday = 7
    const int w = (day_of_year() - dow_iso + 10) / 7;
    const int y = year();
    if (w < 1) return iso_weeks_in_year(y - 1);
    if (w > iso_weeks_in_year(y)) return 1;
    return w;
  }

  std::string to_string() const {
    const auto c = detail::civil_from_days(days_);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", c.year, c.month, c.day);
    return buf;
  }

  Date operator+(std::int64_t n) const { return from_day_number(days_ + n); }
  Date operator-(std::int64_t n) const { return from_day_number(days_ - n); }
  std::int64_t operator-(Date other) const { return days_ - other.days_; }
  Date& operator++() {
    ++days_;
    return *this;
  }

  auto operator<=>(const Date&) const = default;

 private:
  static int iso_weeks_in_year(int y) {
    // 53 weeks iff Jan 1 is a Thursday, or a Wednesday in a leap year.
    const int jan1 = Date(y, 1, 1).day_of_week();
    return (jan1 == 3 || (detail::is_leap_year(y) && jan1 == 2)) ? 53 : 52;
  }

  std::int64_t days_;
};

}  // namespace tollcast
