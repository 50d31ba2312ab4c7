#include "netdiff/solar.hpp"

#include <algorithm>
#include <cmath>

#include "netdiff/errors.hpp"

namespace netdiff::solar {

namespace {

constexpr double kPi = 3.14159265358979323846;
double rad(double deg) { return deg * kPi / 180.0; }
double deg(double r) { return r * 180.0 / kPi; }

double clamp01(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

void PVSystemSpec::validate() const {
  if (dc_rating_kw <= 0) throw ConfigError("PV spec: dc rating must be positive");
  if (tilt_deg < 0 || tilt_deg > 90) throw ConfigError("PV spec: tilt outside [0, 90]");
  if (azimuth_deg < 0 || azimuth_deg >= 360) throw ConfigError("PV spec: azimuth outside [0, 360)");
  if (inverter_efficiency <= 0 || inverter_efficiency > 1)
    throw ConfigError("PV spec: inverter efficiency outside (0, 1]");
  if (system_loss < 0 || system_loss >= 1) throw ConfigError("PV spec: loss outside [0, 1)");
}

SolarAngles solar_position(double lat_deg, double lon_deg, double utc_offset_h,
                           const data::LocalTime& when) {
  require(std::abs(lat_deg) <= 90.0, "latitude outside [-90, 90]");

  // Julian day for the UTC instant (local time minus offset).
  const double day_frac_local = static_cast<double>(when.minutes) / 1440.0;
  const double jd = 2440587.5 + static_cast<double>(when.date.days_since_epoch()) +
                    day_frac_local - utc_offset_h / 24.0;
  const double jc = (jd - 2451545.0) / 36525.0;

  const double l0 = std::fmod(280.46646 + jc * (36000.76983 + jc * 0.0003032), 360.0);
  const double m = 357.52911 + jc * (35999.05029 - 0.0001537 * jc);
  const double e = 0.016708634 - jc * (0.000042037 + 0.0000001267 * jc);
  const double mr = rad(m);
  const double eq_center = std::sin(mr) * (1.914602 - jc * (0.004817 + 0.000014 * jc)) +
                           std::sin(2 * mr) * (0.019993 - 0.000101 * jc) +
                           std::sin(3 * mr) * 0.000289;
  const double true_long = l0 + eq_center;
  const double omega = rad(125.04 - 1934.136 * jc);
  const double app_long = true_long - 0.00569 - 0.00478 * std::sin(omega);
  const double obliq0 =
      23.0 + (26.0 + (21.448 - jc * (46.815 + jc * (0.00059 - jc * 0.001813))) / 60.0) / 60.0;
  const double obliq = obliq0 + 0.00256 * std::cos(omega);

  const double decl = std::asin(clamp01(std::sin(rad(obliq)) * std::sin(rad(app_long))));

  const double var_y = std::pow(std::tan(rad(obliq / 2.0)), 2.0);
  const double l0r = rad(l0);
  const double eq_time_min =
      4.0 * deg(var_y * std::sin(2 * l0r) - 2 * e * std::sin(mr) +
                4 * e * var_y * std::sin(mr) * std::cos(2 * l0r) -
                0.5 * var_y * var_y * std::sin(4 * l0r) - 1.25 * e * e * std::sin(2 * mr));

  double tst = std::fmod(static_cast<double>(when.minutes) + eq_time_min + 4.0 * lon_deg -
                             60.0 * utc_offset_h,
                         1440.0);
  if (tst < 0) tst += 1440.0;
  const double hour_angle = (tst / 4.0 < 0) ? tst / 4.0 + 180.0 : tst / 4.0 - 180.0;

  const double latr = rad(lat_deg);
  const double har = rad(hour_angle);
  const double cos_zen =
      std::sin(latr) * std::sin(decl) + std::cos(latr) * std::cos(decl) * std::cos(har);
  const double zenith = deg(std::acos(clamp01(cos_zen)));

  double azimuth;
  const double sin_zen = std::sin(rad(zenith));
  if (sin_zen < 1e-9) {
    azimuth = 180.0;  // sun effectively overhead; azimuth degenerate
  } else {
    const double cos_az =
        clamp01((std::sin(latr) * cos_zen - std::sin(decl)) / (std::cos(latr) * sin_zen));
    const double az = deg(std::acos(cos_az));
    azimuth = (hour_angle > 0.0) ? std::fmod(az + 180.0, 360.0) : std::fmod(540.0 - az, 360.0);
  }
  return SolarAngles{zenith, azimuth};
}

double poa_irradiance(double dni, double dhi, double ghi, double zenith_deg,
                      double sun_azimuth_deg, double tilt_deg, double panel_azimuth_deg,
                      double albedo) {
  require(dni >= 0 && dhi >= 0 && ghi >= 0, "irradiance must be non-negative");
  const double zr = rad(zenith_deg);
  const double tr = rad(tilt_deg);
  const double cos_aoi = std::cos(zr) * std::cos(tr) +
                         std::sin(zr) * std::sin(tr) *
                             std::cos(rad(sun_azimuth_deg - panel_azimuth_deg));
  const double beam = (zenith_deg < 90.0) ? dni * std::max(cos_aoi, 0.0) : 0.0;
  const double sky = dhi * (1.0 + std::cos(tr)) / 2.0;
  const double ground = ghi * albedo * (1.0 - std::cos(tr)) / 2.0;
  return beam + sky + ground;
}

double cell_temperature(double poa, double t_ambient_c, double wind_ms, double a, double b) {
  require(poa >= 0, "POA must be non-negative");
  return poa * std::exp(a + b * wind_ms) + t_ambient_c;
}

double pv_ac_power(const PVSystemSpec& spec, double poa, double t_cell_c) {
  require(poa >= 0, "POA must be non-negative");
  const double p_dc = spec.dc_rating_kw * (poa / 1000.0) *
                      (1.0 + spec.temp_coeff_per_c * (t_cell_c - 25.0));
  return std::max(spec.inverter_efficiency * p_dc * (1.0 - spec.system_loss), 0.0);
}

const std::vector<double>& default_azimuth_set() {
  static const std::vector<double> a = {90, 120, 150, 180, 210, 240, 270};
  return a;
}

std::vector<double> basis_profile(const WeatherSeries& weather, const Site& site,
                                  double azimuth_deg, double tilt_deg,
                                  const PVSystemSpec& module_defaults) {
  weather.validate();
  PVSystemSpec spec = module_defaults;
  spec.dc_rating_kw = 1.0;
  spec.tilt_deg = tilt_deg;
  spec.azimuth_deg = azimuth_deg;
  spec.validate();

  const std::size_t n = weather.steps();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const data::LocalTime ts{weather.date, weather.minutes_at(i)};
    const SolarAngles sun =
        solar_position(site.latitude_deg, site.longitude_deg, site.utc_offset_h, ts);
    const double poa = poa_irradiance(weather.dni[i], weather.dhi[i], weather.ghi[i],
                                      sun.zenith_deg, sun.azimuth_deg, spec.tilt_deg,
                                      spec.azimuth_deg, spec.albedo);
    const double t_cell =
        cell_temperature(poa, weather.temp_c[i], weather.wind_ms[i], spec.thermal_a,
                         spec.thermal_b);
    out[i] = pv_ac_power(spec, poa, t_cell);
  }
  return out;
}

BasisProfiles basis_matrix(const WeatherSeries& weather, const Site& site,
                           const std::vector<double>& azimuths, double tilt_deg,
                           const PVSystemSpec& module_defaults) {
  if (azimuths.empty()) throw ConfigError("basis matrix: empty azimuth set");
  std::vector<double> sorted = azimuths;
  std::sort(sorted.begin(), sorted.end());

  const std::int64_t L = static_cast<std::int64_t>(sorted.size());
  const std::int64_t T = static_cast<std::int64_t>(weather.steps());
  BasisProfiles basis;
  basis.azimuths_deg = sorted;
  basis.date = weather.date;
  basis.matrix = numerics::Tensor::zeros({L, T});
  for (std::int64_t r = 0; r < L; ++r) {
    const std::vector<double> row =
        basis_profile(weather, site, sorted[static_cast<std::size_t>(r)], tilt_deg,
                      module_defaults);
    std::copy(row.begin(), row.end(), basis.matrix.data() + r * T);
  }
  return basis;
}

ClearSky clear_sky_irradiance(double zenith_deg) {
  if (zenith_deg >= 90.0) return ClearSky{0.0, 0.0, 0.0};
  const double cz = std::cos(rad(zenith_deg));
  // Kasten-Young air mass, Meinel beam attenuation.
  const double am = 1.0 / (cz + 0.50572 * std::pow(96.07995 - zenith_deg, -1.6364));
  const double dni = 1353.0 * 0.7 * std::pow(0.7, std::pow(am, 0.678) - 1.0);
  const double dhi = 90.0 * std::pow(cz, 0.6);
  return ClearSky{dni, dhi, dni * cz + dhi};
}

WeatherSeries synth_weather_day(const data::Date& date, const Site& site, double clearness,
                                double temp_base_c, double wind_ms) {
  require(clearness > 0.0 && clearness <= 1.0, "clearness must be in (0, 1]");
  WeatherSeries w;
  w.date = date;
  w.step_minutes = 15;
  const std::size_t n = 96;
  w.temp_c.resize(n);
  w.wind_ms.assign(n, wind_ms);
  w.dni.resize(n);
  w.dhi.resize(n);
  w.ghi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const data::LocalTime ts{date, w.minutes_at(i)};
    const SolarAngles sun =
        solar_position(site.latitude_deg, site.longitude_deg, site.utc_offset_h, ts);
    const ClearSky cs = clear_sky_irradiance(sun.zenith_deg);
    const double dni = clearness * cs.dni;
    // Cloud cover converts part of the lost beam into diffuse.
    const double dhi = cs.dhi * (1.0 + 1.5 * (1.0 - clearness));
    const double cz = std::max(std::cos(rad(sun.zenith_deg)), 0.0);
    w.dni[i] = dni;
    w.dhi[i] = dhi;
    w.ghi[i] = (sun.zenith_deg < 90.0) ? dni * cz + dhi : 0.0;
    // Mild diurnal temperature swing peaking mid-afternoon.
    const double hours = static_cast<double>(w.minutes_at(i)) / 60.0;
    w.temp_c[i] = temp_base_c + 6.0 * std::sin((hours - 9.0) / 24.0 * 2.0 * kPi);
  }
  return w;
}

}  // namespace netdiff::solar
