#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netdiff/calendar.hpp"
#include "netdiff/tensor.hpp"
#include "netdiff/weather.hpp"

namespace netdiff::data {

inline constexpr int kSlotsPerDay = 96;
inline constexpr int kIdSlots = 25;        // one-hot width for customer identity
inline constexpr int kPvSlots = 4;         // total, west, south, east capacity
inline constexpr int kDateSlots = 12 + 31 + 7;
inline constexpr int kConditionDim = kIdSlots + kPvSlots + kDateSlots;  // 79

struct PvCapacities {
  double total_kw = 0.0;
  double west_kw = 0.0;
  double south_kw = 0.0;
  double east_kw = 0.0;
};

// One customer-day of net-load readings (kW).  Load/solar components are
// present only for synthetic data.
struct NetLoadProfile {
  int customer_id = 0;
  Date date;
  std::vector<double> net_kw;                   // length 96; NaN marks a gap
  std::optional<std::vector<double>> load_kw;   // Lo
  std::optional<std::vector<double>> solar_kw;  // So
};

struct Bounds {
  double min = 0.0;
  double max = 0.0;
};

// Per-customer min/max over every profile in the set.
std::map<int, Bounds> compute_bounds(const std::vector<NetLoadProfile>& profiles);

// Min-max normalization onto [-1, 1] and its inverse.
std::vector<double> normalize(const std::vector<double>& values, const Bounds& bounds);
std::vector<double> denormalize(const std::vector<double>& values, const Bounds& bounds);

// Fills NaN gaps with the mean of the nearest observed values on each side;
// a gap touching the boundary copies its single neighbour.
std::vector<double> impute_missing(const std::vector<double>& series);

// Linear interpolation of an hourly day onto the 15-minute grid.  Exact at
// the hourly knots; the three slots after the last knot hold its value.
solar::WeatherSeries interpolate_weather(const solar::WeatherSeries& hourly);

// 79-dim condition vector laid out as
// [ID one-hot | total,west,south,east kW | month | day-of-month | weekday].
numerics::Tensor encode_condition(int customer_index, const PvCapacities& caps,
                                  const Date& date);

struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
  double ratio = 0.0;
};

// Per-customer stratified random split, reproducible by seed.
DatasetSplit split_dataset(const std::vector<NetLoadProfile>& profiles, double ratio,
                           std::uint64_t seed);

struct CustomerInfo {
  int customer_id = 0;
  int index = 0;  // position in the ID one-hot
  PvCapacities caps;
};

// CSV schemas (see README): net-load rows are customer_id,date,t0..t95 and
// PV metadata rows are customer_id,cap_total,cap_west,cap_south,cap_east.
std::vector<NetLoadProfile> read_netload_csv(const std::string& path);
void write_netload_csv(const std::string& path, const std::vector<NetLoadProfile>& profiles);
std::vector<CustomerInfo> read_pv_csv(const std::string& path);
void write_pv_csv(const std::string& path, const std::vector<CustomerInfo>& customers);
void write_components_csv(const std::string& path,
                          const std::vector<NetLoadProfile>& profiles);

// Fully loaded dataset: profiles imputed, weather on the 15-minute grid,
// bounds computed jointly over the whole set per customer.
struct Dataset {
  std::vector<CustomerInfo> customers;  // order defines one-hot indices
  std::vector<NetLoadProfile> profiles;
  solar::WeatherByDate weather;
  std::map<int, Bounds> bounds;

  const CustomerInfo* find_customer(int customer_id) const;
};

Dataset load_dataset(const std::string& netload_csv, const std::string& pv_csv,
                     const std::string& weather_csv);

}  // namespace netdiff::data
