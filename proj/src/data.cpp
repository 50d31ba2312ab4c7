#include "netdiff/data.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "netdiff/csv.hpp"
#include "netdiff/errors.hpp"
#include "netdiff/rng.hpp"

namespace netdiff::data {

std::map<int, Bounds> compute_bounds(const std::vector<NetLoadProfile>& profiles) {
  std::map<int, Bounds> out;
  std::map<int, bool> seen;
  for (const auto& p : profiles) {
    auto& b = out[p.customer_id];
    if (!seen[p.customer_id]) {
      b.min = b.max = p.net_kw.empty() ? 0.0 : p.net_kw[0];
      seen[p.customer_id] = true;
    }
    for (double v : p.net_kw) {
      if (std::isnan(v)) continue;
      b.min = std::min(b.min, v);
      b.max = std::max(b.max, v);
    }
  }
  return out;
}

std::vector<double> normalize(const std::vector<double>& values, const Bounds& bounds) {
  if (!(bounds.max > bounds.min))
    throw ConfigError("normalize: degenerate bounds (max must exceed min)");
  std::vector<double> out(values.size());
  const double span = bounds.max - bounds.min;
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = 2.0 * (values[i] - bounds.min) / span - 1.0;
  return out;
}

std::vector<double> denormalize(const std::vector<double>& values, const Bounds& bounds) {
  if (!(bounds.max > bounds.min))
    throw ConfigError("denormalize: degenerate bounds (max must exceed min)");
  std::vector<double> out(values.size());
  const double span = bounds.max - bounds.min;
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = bounds.min + (values[i] + 1.0) * span / 2.0;
  return out;
}

std::vector<double> impute_missing(const std::vector<double>& series) {
  const std::size_t n = series.size();
  std::vector<double> out = series;
  bool any_observed = false;
  for (double v : series)
    if (!std::isnan(v)) any_observed = true;
  if (!any_observed) throw ParseError("impute: series has no observed values");

  // prev[i]/next[i]: index of nearest observed value at or before/after i.
  std::vector<std::ptrdiff_t> prev(n, -1), next(n, -1);
  std::ptrdiff_t last = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isnan(series[i])) last = static_cast<std::ptrdiff_t>(i);
    prev[i] = last;
  }
  last = -1;
  for (std::size_t i = n; i-- > 0;) {
    if (!std::isnan(series[i])) last = static_cast<std::ptrdiff_t>(i);
    next[i] = last;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isnan(series[i])) continue;
    if (prev[i] >= 0 && next[i] >= 0)
      out[i] = 0.5 * (series[static_cast<std::size_t>(prev[i])] +
                      series[static_cast<std::size_t>(next[i])]);
    else if (prev[i] >= 0)
      out[i] = series[static_cast<std::size_t>(prev[i])];
    else
      out[i] = series[static_cast<std::size_t>(next[i])];
  }
  return out;
}

solar::WeatherSeries interpolate_weather(const solar::WeatherSeries& hourly) {
  hourly.validate();
  if (hourly.step_minutes == 15) return hourly;  // already on target grid
  require(hourly.step_minutes == 60, "interpolate_weather expects an hourly grid");

  auto lerp_channel = [](const std::vector<double>& h) {
    std::vector<double> out(96);
    for (std::size_t i = 0; i < 96; ++i) {
      const std::size_t k = i / 4;
      const double frac = static_cast<double>(i % 4) / 4.0;
      if (k + 1 < h.size())
        out[i] = h[k] + frac * (h[k + 1] - h[k]);
      else
        out[i] = h[k];  // past the 23:00 knot
    }
    return out;
  };

  solar::WeatherSeries w;
  w.date = hourly.date;
  w.step_minutes = 15;
  w.temp_c = lerp_channel(hourly.temp_c);
  w.wind_ms = lerp_channel(hourly.wind_ms);
  w.dni = lerp_channel(hourly.dni);
  w.dhi = lerp_channel(hourly.dhi);
  w.ghi = lerp_channel(hourly.ghi);
  return w;
}

numerics::Tensor encode_condition(int customer_index, const PvCapacities& caps,
                                  const Date& date) {
  if (customer_index < 0 || customer_index >= kIdSlots)
    throw ParseError("condition: customer index " + std::to_string(customer_index) +
                     " outside [0, " + std::to_string(kIdSlots) + ")");
  if (!date.valid()) throw ParseError("condition: invalid date");
  if (caps.total_kw < 0 || caps.west_kw < 0 || caps.south_kw < 0 || caps.east_kw < 0)
    throw ParseError("condition: negative PV capacity");

  numerics::Tensor y = numerics::Tensor::zeros({kConditionDim});
  y[customer_index] = 1.0;
  int off = kIdSlots;
  y[off + 0] = caps.total_kw;
  y[off + 1] = caps.west_kw;
  y[off + 2] = caps.south_kw;
  y[off + 3] = caps.east_kw;
  off += kPvSlots;
  y[off + (date.month - 1)] = 1.0;
  off += 12;
  y[off + (date.day - 1)] = 1.0;
  off += 31;
  y[off + date.weekday()] = 1.0;
  return y;
}

DatasetSplit split_dataset(const std::vector<NetLoadProfile>& profiles, double ratio,
                           std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw ConfigError("split: ratio must lie strictly inside (0, 1)");
  // Shuffle the distinct dates once and cut every customer's rows by that
  // shared order. Each customer still gets an exact ratio split, but a
  // held-out date is held out for all meters at once: otherwise the calendar
  // one-hots would leak a test day's weather through another customer's
  // training rows.
  std::set<Date> date_set;
  for (const auto& p : profiles) date_set.insert(p.date);
  std::vector<Date> dates(date_set.begin(), date_set.end());
  numerics::Rng rng(seed, numerics::kStreamSplit);
  for (std::size_t i = dates.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(dates[i - 1], dates[j]);
  }
  std::map<Date, std::size_t> rank;
  for (std::size_t r = 0; r < dates.size(); ++r) rank.emplace(dates[r], r);

  std::map<int, std::vector<std::size_t>> by_customer;
  for (std::size_t i = 0; i < profiles.size(); ++i)
    by_customer[profiles[i].customer_id].push_back(i);

  DatasetSplit split;
  split.seed = seed;
  split.ratio = ratio;
  for (auto& [id, idx] : by_customer) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return rank.at(profiles[a].date) < rank.at(profiles[b].date);
    });
    const auto n_train = static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(idx.size())));
    for (std::size_t k = 0; k < idx.size(); ++k)
      (k < n_train ? split.train : split.test).push_back(idx[k]);
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<NetLoadProfile> read_netload_csv(const std::string& path) {
  io::CsvReader reader(path);
  std::vector<std::string> fields;
  if (!reader.next_row(fields) || fields.size() != 2 + kSlotsPerDay ||
      fields[0] != "customer_id" || fields[1] != "date")
    throw ParseError(path + ": expected header customer_id,date,t0..t95");

  std::vector<NetLoadProfile> out;
  while (reader.next_row(fields)) {
    const std::string ctx = path + ":" + std::to_string(reader.line_number());
    if (fields.size() != 2 + kSlotsPerDay)
      throw ParseError(ctx + ": expected " + std::to_string(2 + kSlotsPerDay) + " columns");
    NetLoadProfile p;
    p.customer_id = static_cast<int>(io::parse_required(fields[0], ctx));
    p.date = Date::parse(fields[1]);
    p.net_kw.resize(kSlotsPerDay);
    for (int t = 0; t < kSlotsPerDay; ++t) {
      const auto v = io::parse_field(fields[static_cast<std::size_t>(2 + t)], ctx);
      p.net_kw[static_cast<std::size_t>(t)] = v ? *v : std::nan("");
    }
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::string slot_header(const std::string& prefix) {
  std::string h = prefix;
  for (int t = 0; t < kSlotsPerDay; ++t) h += ",t" + std::to_string(t);
  return h;
}

}  // namespace

void write_netload_csv(const std::string& path, const std::vector<NetLoadProfile>& profiles) {
  io::CsvWriter csv(path);
  csv.raw_line(slot_header("customer_id,date"));
  for (const auto& p : profiles) {
    std::vector<std::string> row = {std::to_string(p.customer_id), p.date.iso()};
    for (double v : p.net_kw) row.push_back(std::isnan(v) ? "" : io::format_double(v));
    csv.row(row);
  }
}

std::vector<CustomerInfo> read_pv_csv(const std::string& path) {
  io::CsvReader reader(path);
  std::vector<std::string> fields;
  if (!reader.next_row(fields) || fields.size() != 5 || fields[0] != "customer_id")
    throw ParseError(path +
                     ": expected header customer_id,cap_total,cap_west,cap_south,cap_east");
  std::vector<CustomerInfo> out;
  while (reader.next_row(fields)) {
    const std::string ctx = path + ":" + std::to_string(reader.line_number());
    if (fields.size() != 5) throw ParseError(ctx + ": expected 5 columns");
    CustomerInfo c;
    c.customer_id = static_cast<int>(io::parse_required(fields[0], ctx));
    c.index = static_cast<int>(out.size());
    c.caps.total_kw = io::parse_required(fields[1], ctx);
    c.caps.west_kw = io::parse_required(fields[2], ctx);
    c.caps.south_kw = io::parse_required(fields[3], ctx);
    c.caps.east_kw = io::parse_required(fields[4], ctx);
    out.push_back(c);
  }
  if (out.size() > static_cast<std::size_t>(kIdSlots))
    throw ParseError(path + ": more than " + std::to_string(kIdSlots) + " customers");
  return out;
}

void write_pv_csv(const std::string& path, const std::vector<CustomerInfo>& customers) {
  io::CsvWriter csv(path);
  csv.raw_line("customer_id,cap_total,cap_west,cap_south,cap_east");
  for (const auto& c : customers)
    csv.row({std::to_string(c.customer_id), io::format_double(c.caps.total_kw),
             io::format_double(c.caps.west_kw), io::format_double(c.caps.south_kw),
             io::format_double(c.caps.east_kw)});
}

void write_components_csv(const std::string& path,
                          const std::vector<NetLoadProfile>& profiles) {
  io::CsvWriter csv(path);
  csv.raw_line(slot_header("customer_id,date,kind"));
  for (const auto& p : profiles) {
    if (!p.load_kw || !p.solar_kw) continue;
    for (const auto& [kind, values] :
         {std::pair{"load", &*p.load_kw}, std::pair{"solar", &*p.solar_kw}}) {
      std::vector<std::string> row = {std::to_string(p.customer_id), p.date.iso(), kind};
      for (double v : *values) row.push_back(io::format_double(v));
      csv.row(row);
    }
  }
}

const CustomerInfo* Dataset::find_customer(int customer_id) const {
  for (const auto& c : customers)
    if (c.customer_id == customer_id) return &c;
  return nullptr;
}

Dataset load_dataset(const std::string& netload_csv, const std::string& pv_csv,
                     const std::string& weather_csv) {
  Dataset ds;
  ds.customers = read_pv_csv(pv_csv);
  ds.profiles = read_netload_csv(netload_csv);
  for (auto& p : ds.profiles) {
    if (!ds.find_customer(p.customer_id))
      throw ParseError(netload_csv + ": customer " + std::to_string(p.customer_id) +
                       " missing from PV metadata");
    p.net_kw = impute_missing(p.net_kw);
  }
  auto weather = solar::read_weather_csv(weather_csv);
  for (auto& [date, w] : weather) ds.weather.emplace(date, interpolate_weather(w));
  ds.bounds = compute_bounds(ds.profiles);
  return ds;
}

}  // namespace netdiff::data
