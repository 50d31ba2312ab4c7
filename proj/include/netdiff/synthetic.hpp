#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "netdiff/data.hpp"
#include "netdiff/solar.hpp"

namespace netdiff::data {

// Additive daily load shape: base plus morning and evening Gaussian bumps
// (hours and widths in hours) plus white noise, clamped at zero.
struct LoadShape {
  double base_kw = 0.4;
  double morning_kw = 1.2;
  double morning_hour = 7.5;
  double morning_width_h = 1.5;
  double evening_kw = 2.2;
  double evening_hour = 19.0;
  double evening_width_h = 2.5;
  double noise_kw = 0.05;
};

struct SyntheticCustomer {
  int customer_id = 0;
  LoadShape shape;
  PvCapacities caps;  // total derived from the orientation capacities
};

struct SyntheticDatasetConfig {
  int n_customers = 3;
  int n_days = 120;
  Date start_date{2018, 3, 1};
  std::uint64_t seed = 7;
  solar::Site site;
  double tilt_deg = 30.2672;
  // When empty, customers are drawn from the seed.
  std::vector<SyntheticCustomer> customers;
  // When unset, clear-sky weather with per-day random clearness is used.
  std::optional<solar::WeatherByDate> weather;
};

struct SyntheticDataset {
  std::vector<CustomerInfo> customers;
  std::vector<NetLoadProfile> profiles;  // load/solar components populated
  solar::WeatherByDate weather;
};

// Net load = load - capacity-weighted solar basis profiles; every profile
// satisfies net = load - solar exactly.
SyntheticDataset generate_synthetic_dataset(const SyntheticDatasetConfig& cfg);

}  // namespace netdiff::data
