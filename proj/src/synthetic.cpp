#include "netdiff/synthetic.hpp"

#include <cmath>
#include <string>

#include "netdiff/errors.hpp"
#include "netdiff/rng.hpp"

namespace netdiff::data {

namespace {

constexpr double kPi = 3.14159265358979323846;

double bump(double hour, double peak, double width) {
  const double d = (hour - peak) / width;
  return std::exp(-0.5 * d * d);
}

SyntheticCustomer draw_customer(int id, std::uint64_t seed) {
  numerics::Rng rng(seed, numerics::stream_id("synth/customer/" + std::to_string(id)));
  SyntheticCustomer c;
  c.customer_id = id;
  c.shape.base_kw = rng.uniform(0.25, 0.6);
  c.shape.morning_kw = rng.uniform(0.8, 2.0);
  c.shape.morning_hour = rng.uniform(6.5, 8.5);
  c.shape.morning_width_h = rng.uniform(1.0, 2.0);
  c.shape.evening_kw = rng.uniform(1.5, 3.5);
  c.shape.evening_hour = rng.uniform(18.0, 21.0);
  c.shape.evening_width_h = rng.uniform(1.5, 3.0);
  c.shape.noise_kw = rng.uniform(0.04, 0.08);
  c.caps.south_kw = rng.uniform(2.0, 5.0);
  c.caps.west_kw = rng.uniform(0.0, 2.0);
  c.caps.east_kw = rng.uniform(0.0, 2.0);
  c.caps.total_kw = c.caps.south_kw + c.caps.west_kw + c.caps.east_kw;
  return c;
}

solar::WeatherSeries draw_weather_day(const Date& date, const solar::Site& site,
                                      std::uint64_t seed) {
  numerics::Rng rng(seed, numerics::stream_id("synth/day/" + date.iso()));
  const double clearness = rng.uniform(0.25, 1.0);
  // Mild seasonal swing around a temperate mean; wind constant per day.
  const int doy = date.days_since_epoch() - Date{date.year, 1, 1}.days_since_epoch();
  const double t_mean = 16.0 + 9.0 * std::sin(2.0 * kPi * (doy - 100) / 365.25);
  const double wind = rng.uniform(1.0, 6.0);
  return solar::synth_weather_day(date, site, clearness, t_mean, wind);
}

}  // namespace

SyntheticDataset generate_synthetic_dataset(const SyntheticDatasetConfig& cfg) {
  if (cfg.n_customers < 1 || cfg.n_customers > kIdSlots)
    throw ConfigError("synthetic: n_customers must be in [1, " +
                      std::to_string(kIdSlots) + "]");
  if (cfg.n_days < 1) throw ConfigError("synthetic: n_days must be positive");
  if (!cfg.start_date.valid()) throw ConfigError("synthetic: invalid start date");
  if (!cfg.customers.empty() &&
      static_cast<int>(cfg.customers.size()) != cfg.n_customers)
    throw ConfigError("synthetic: customer list size mismatch");

  SyntheticDataset out;
  std::vector<SyntheticCustomer> custs = cfg.customers;
  if (custs.empty()) {
    custs.reserve(cfg.n_customers);
    for (int i = 0; i < cfg.n_customers; ++i)
      custs.push_back(draw_customer(i, cfg.seed));
  }
  for (int i = 0; i < cfg.n_customers; ++i) {
    if (custs[i].customer_id != i)
      throw ConfigError("synthetic: customer ids must be 0..n-1 in order");
    out.customers.push_back(CustomerInfo{i, i, custs[i].caps});
  }

  // Weather first: every requested day must exist before we price the PV.
  if (cfg.weather) {
    out.weather = *cfg.weather;
    Date d = cfg.start_date;
    for (int k = 0; k < cfg.n_days; ++k, d = d.next())
      if (!out.weather.count(d))
        throw ConfigError("synthetic: supplied weather missing " + d.iso());
  } else {
    Date d = cfg.start_date;
    for (int k = 0; k < cfg.n_days; ++k, d = d.next())
      out.weather.emplace(d, draw_weather_day(d, cfg.site, cfg.seed));
  }

  // One basis evaluation per day covers the three roof orientations.
  const std::vector<double> orient_az = {90.0, 180.0, 270.0};  // east/south/west

  Date d = cfg.start_date;
  for (int k = 0; k < cfg.n_days; ++k, d = d.next()) {
    const solar::WeatherSeries& wx = out.weather.at(d);
    const solar::BasisProfiles basis =
        solar::basis_matrix(wx, cfg.site, orient_az, cfg.tilt_deg);
    for (int i = 0; i < cfg.n_customers; ++i) {
      const SyntheticCustomer& c = custs[i];
      numerics::Rng noise(cfg.seed,
                numerics::stream_id("synth/noise/" + std::to_string(i) + "/" + d.iso()));
      NetLoadProfile p;
      p.customer_id = i;
      p.date = d;
      p.net_kw.resize(kSlotsPerDay);
      p.load_kw.emplace(kSlotsPerDay);
      p.solar_kw.emplace(kSlotsPerDay);
      for (int t = 0; t < kSlotsPerDay; ++t) {
        const double hour = (t + 0.5) / 4.0;
        double lo = c.shape.base_kw +
                    c.shape.morning_kw *
                        bump(hour, c.shape.morning_hour, c.shape.morning_width_h) +
                    c.shape.evening_kw *
                        bump(hour, c.shape.evening_hour, c.shape.evening_width_h) +
                    c.shape.noise_kw * noise.normal();
        lo = std::max(lo, 0.0);
        const double so = c.caps.east_kw * basis.matrix.at(0, t) +
                          c.caps.south_kw * basis.matrix.at(1, t) +
                          c.caps.west_kw * basis.matrix.at(2, t);
        (*p.load_kw)[t] = lo;
        (*p.solar_kw)[t] = so;
        p.net_kw[t] = lo - so;
      }
      out.profiles.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace netdiff::data
