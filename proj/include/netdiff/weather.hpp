#pragma once

#include <map>
#include <string>
#include <vector>

#include "netdiff/calendar.hpp"

namespace netdiff::solar {

struct Site {
  double latitude_deg = 30.2672;   // Austin, TX defaults
  double longitude_deg = -97.74;
  double utc_offset_h = -6.0;
};

// Weather channels for one day on a regular local-time grid (hourly or
// 15-minute).  Irradiance in W/m^2, temperature in deg C, wind in m/s.
struct WeatherSeries {
  data::Date date;
  int step_minutes = 15;
  std::vector<double> temp_c;
  std::vector<double> wind_ms;
  std::vector<double> dni;
  std::vector<double> dhi;
  std::vector<double> ghi;

  std::size_t steps() const { return temp_c.size(); }
  int minutes_at(std::size_t i) const { return static_cast<int>(i) * step_minutes; }
  // Throws on ragged channels, negative irradiance or wrong grid length.
  void validate() const;
};

using WeatherByDate = std::map<data::Date, WeatherSeries>;

// CSV schema: timestamp,temp_c,wind_ms,dni,dhi,ghi with ISO-8601 local
// timestamps.  Rows are grouped per day; each day must be a complete hourly
// (24) or 15-minute (96) grid starting at midnight.
WeatherByDate read_weather_csv(const std::string& path);
void write_weather_csv(const std::string& path, const WeatherByDate& weather);

}  // namespace netdiff::solar
