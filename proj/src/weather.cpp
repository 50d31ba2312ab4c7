#include "netdiff/weather.hpp"

#include "netdiff/csv.hpp"
#include "netdiff/errors.hpp"

namespace netdiff::solar {

void WeatherSeries::validate() const {
  const std::size_t n = steps();
  if (step_minutes != 15 && step_minutes != 60)
    throw ParseError("weather: grid step must be 15 or 60 minutes");
  const std::size_t expected = static_cast<std::size_t>(1440 / step_minutes);
  if (n != expected || wind_ms.size() != n || dni.size() != n || dhi.size() != n ||
      ghi.size() != n)
    throw ParseError("weather for " + date.iso() + ": incomplete day (" +
                     std::to_string(n) + " rows)");
  for (std::size_t i = 0; i < n; ++i) {
    if (dni[i] < 0 || dhi[i] < 0 || ghi[i] < 0)
      throw ParseError("weather for " + date.iso() + ": negative irradiance");
  }
}

WeatherByDate read_weather_csv(const std::string& path) {
  io::CsvReader reader(path);
  std::vector<std::string> fields;
  if (!reader.next_row(fields) || fields.size() < 6 || fields[0] != "timestamp")
    throw ParseError(path + ": expected header timestamp,temp_c,wind_ms,dni,dhi,ghi");

  struct Row {
    int minutes;
    double t, w, dni, dhi, ghi;
  };
  std::map<data::Date, std::vector<Row>> by_date;
  while (reader.next_row(fields)) {
    const std::string ctx = path + ":" + std::to_string(reader.line_number());
    if (fields.size() != 6) throw ParseError(ctx + ": expected 6 columns");
    const data::LocalTime ts = data::LocalTime::parse(fields[0]);
    by_date[ts.date].push_back(Row{ts.minutes, io::parse_required(fields[1], ctx),
                                   io::parse_required(fields[2], ctx),
                                   io::parse_required(fields[3], ctx),
                                   io::parse_required(fields[4], ctx),
                                   io::parse_required(fields[5], ctx)});
  }

  WeatherByDate out;
  for (auto& [date, rows] : by_date) {
    const std::size_t n = rows.size();
    int step = 0;
    if (n == 96) step = 15;
    else if (n == 24) step = 60;
    else
      throw ParseError(path + ": day " + date.iso() + " has " + std::to_string(n) +
                       " rows; expected 24 (hourly) or 96 (15-min)");
    WeatherSeries w;
    w.date = date;
    w.step_minutes = step;
    w.temp_c.resize(n);
    w.wind_ms.resize(n);
    w.dni.resize(n);
    w.dhi.resize(n);
    w.ghi.resize(n);
    std::vector<bool> seen(n, false);
    for (const Row& r : rows) {
      if (r.minutes % step != 0)
        throw ParseError(path + ": day " + date.iso() + " timestamp off the grid");
      const std::size_t i = static_cast<std::size_t>(r.minutes / step);
      if (seen[i]) throw ParseError(path + ": day " + date.iso() + " duplicate timestamp");
      seen[i] = true;
      w.temp_c[i] = r.t;
      w.wind_ms[i] = r.w;
      w.dni[i] = r.dni;
      w.dhi[i] = r.dhi;
      w.ghi[i] = r.ghi;
    }
    for (bool s : seen)
      if (!s) throw ParseError(path + ": day " + date.iso() + " has gaps in the grid");
    w.validate();
    out.emplace(date, std::move(w));
  }
  return out;
}

void write_weather_csv(const std::string& path, const WeatherByDate& weather) {
  io::CsvWriter csv(path);
  csv.raw_line("timestamp,temp_c,wind_ms,dni,dhi,ghi");
  for (const auto& [date, w] : weather) {
    for (std::size_t i = 0; i < w.steps(); ++i) {
      data::LocalTime ts{date, w.minutes_at(i)};
      csv.row({ts.iso(), io::format_double(w.temp_c[i]), io::format_double(w.wind_ms[i]),
               io::format_double(w.dni[i]), io::format_double(w.dhi[i]),
               io::format_double(w.ghi[i])});
    }
  }
}

}  // namespace netdiff::solar
