#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace netdiff::data {

// Calendar date with civil-calendar helpers; time-of-day is carried
// separately as minutes since local midnight.
struct Date {
  int year = 2018;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  auto operator<=>(const Date&) const = default;

  bool valid() const;
  // 0 = Monday .. 6 = Sunday.
  int weekday() const;
  // Days since 1970-01-01.
  std::int64_t days_since_epoch() const;
  Date next() const;
  std::string iso() const;  // YYYY-MM-DD

  static Date parse(const std::string& iso);
};

// Local timestamp = date + minutes since midnight.
struct LocalTime {
  Date date;
  int minutes = 0;  // 0..1439

  std::string iso() const;  // YYYY-MM-DDTHH:MM
  static LocalTime parse(const std::string& iso);
};

}  // namespace netdiff::data
