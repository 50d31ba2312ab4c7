#pragma once

#include <vector>

#include "netdiff/calendar.hpp"
#include "netdiff/tensor.hpp"
#include "netdiff/weather.hpp"

namespace netdiff::solar {

// Flat-plate PV system for the performance chain.  Azimuth is degrees
// clockwise from north (180 = south); tilt is degrees from horizontal.
struct PVSystemSpec {
  double dc_rating_kw = 1.0;
  double tilt_deg = 30.2672;
  double azimuth_deg = 180.0;
  double inverter_efficiency = 0.96;
  double system_loss = 0.14;
  double temp_coeff_per_c = -0.0047;  // power temperature coefficient
  double albedo = 0.2;
  // Sandia open-rack glass/polymer thermal-model coefficients.
  double thermal_a = -3.56;
  double thermal_b = -0.075;

  void validate() const;
};

struct SolarAngles {
  double zenith_deg;   // 0 = overhead, 90 = horizon
  double azimuth_deg;  // clockwise from north, [0, 360)
};

// Sun position from the NOAA solar-geometry formulas (Meeus-based), good to
// a fraction of a degree at this resolution.  utc_offset in hours; local
// time = UTC + offset.
SolarAngles solar_position(double lat_deg, double lon_deg, double utc_offset_h,
                           const data::LocalTime& when);

// Plane-of-array irradiance: beam with incidence projection, isotropic sky
// diffuse, constant-albedo ground reflection.  Beam contributes only while
// the sun is above the horizon.
double poa_irradiance(double dni, double dhi, double ghi, double zenith_deg,
                      double sun_azimuth_deg, double tilt_deg, double panel_azimuth_deg,
                      double albedo);

// Sandia cell-temperature model: T_cell = POA * exp(a + b*wind) + T_ambient.
double cell_temperature(double poa, double t_ambient_c, double wind_ms, double a, double b);

// DC power at reference conditions scaled by irradiance and temperature,
// then inverter efficiency and overall loss; clamped at zero.  Returns kW.
double pv_ac_power(const PVSystemSpec& spec, double poa, double t_cell_c);

// The default azimuth set (east through west in 30-degree steps).
const std::vector<double>& default_azimuth_set();

// Per-azimuth unit-capacity AC output profiles for one day.
struct BasisProfiles {
  std::vector<double> azimuths_deg;  // ascending, length L
  numerics::Tensor matrix;           // (L, T) kW per kW DC
  data::Date date;
};

// AC output of a 1 kW-DC system at the given azimuth for every timestep of
// the day; tilt defaults to the site latitude.
std::vector<double> basis_profile(const WeatherSeries& weather, const Site& site,
                                  double azimuth_deg, double tilt_deg,
                                  const PVSystemSpec& module_defaults = PVSystemSpec{});

BasisProfiles basis_matrix(const WeatherSeries& weather, const Site& site,
                           const std::vector<double>& azimuths, double tilt_deg,
                           const PVSystemSpec& module_defaults = PVSystemSpec{});

// Simple clear-sky irradiance (Kasten-Young air mass with a Meinel beam
// attenuation); GHI satisfies the closure identity exactly.  Used by the
// synthetic weather generator and the physics tests.
struct ClearSky {
  double dni, dhi, ghi;
};
ClearSky clear_sky_irradiance(double zenith_deg);

// Clear-sky weather day on a 15-minute grid, scaled by a per-day clearness
// factor in (0, 1]; cloudier days shift energy from beam to diffuse.
WeatherSeries synth_weather_day(const data::Date& date, const Site& site, double clearness,
                                double temp_base_c = 20.0, double wind_ms = 3.0);

}  // namespace netdiff::solar
