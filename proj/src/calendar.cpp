#include "netdiff/calendar.hpp"

#include <cstdio>

#include "netdiff/errors.hpp"

namespace netdiff::data {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static const int d[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return d[m - 1];
}

}  // namespace

bool Date::valid() const {
  return month >= 1 && month <= 12 && day >= 1 && day <= days_in_month(year, month);
}

std::int64_t Date::days_since_epoch() const {
  // Howard Hinnant's days_from_civil.
  const int y = year - (month <= 2 ? 1 : 0);
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = static_cast<unsigned>((153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

int Date::weekday() const {
  // 1970-01-01 was a Thursday (index 3 with Monday = 0).
  const std::int64_t d = days_since_epoch();
  return static_cast<int>(((d % 7) + 7 + 3) % 7);
}

Date Date::next() const {
  Date d = *this;
  if (++d.day > days_in_month(d.year, d.month)) {
    d.day = 1;
    if (++d.month > 12) {
      d.month = 1;
      ++d.year;
    }
  }
  return d;
}

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

Date Date::parse(const std::string& iso) {
  Date d;
  if (std::sscanf(iso.c_str(), "%4d-%2d-%2d", &d.year, &d.month, &d.day) != 3 || !d.valid())
    throw ParseError("bad date: '" + iso + "' (expected YYYY-MM-DD)");
  return d;
}

std::string LocalTime::iso() const {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%sT%02d:%02d", date.iso().c_str(), minutes / 60, minutes % 60);
  return buf;
}

LocalTime LocalTime::parse(const std::string& iso) {
  LocalTime t;
  int h = 0, m = 0, s = 0;
  char sep = 0;
  const int n = std::sscanf(iso.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d", &t.date.year,
                            &t.date.month, &t.date.day, &sep, &h, &m, &s);
  if (n < 6 || (sep != 'T' && sep != ' ') || !t.date.valid() || h < 0 || h > 23 || m < 0 ||
      m > 59)
    throw ParseError("bad timestamp: '" + iso + "'");
  t.minutes = h * 60 + m;
  return t;
}

}  // namespace netdiff::data
