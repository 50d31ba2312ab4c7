#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "netdiff/tensor.hpp"

namespace netdiff::eval {

// One evaluated condition: M generated trajectories against the observed
// day, both in physical units (kW).
struct Ensemble {
  numerics::Tensor samples;    // (M, T)
  std::vector<double> actual;  // length T

  std::int64_t m() const { return samples.rows(); }
  std::int64_t t() const { return samples.cols(); }
  void validate() const;
};

inline constexpr std::array<double, 9> kReportQuantiles = {
    0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

// Empirical quantile with linear interpolation between order statistics.
double empirical_quantile(std::vector<double> values, double q);

// Per-slot mean squared deviation of the samples from the actual.
numerics::Tensor mse_per_time(const Ensemble& e);

// Pinball loss of the empirical q-quantile against the actual, mean over
// slots.
double quantile_score(const Ensemble& e, double q);

// Per-slot ensemble CRPS (energy form).
numerics::Tensor crps_per_time(const Ensemble& e);
double crps_mean(const Ensemble& e);

// Energy score over whole daily trajectories; needs at least two members.
double energy_score(const Ensemble& e);

// Variogram score over unordered slot pairs with equal weights.
double variogram_score(const Ensemble& e, double gamma = 0.5);

// Errors pooled over every sample, slot, and condition.
struct PooledErrors {
  double mae = 0.0;
  double rmse = 0.0;
};
PooledErrors mae_rmse(const std::vector<Ensemble>& ensembles);

struct MetricRow {
  std::string model;
  double mae = 0.0, rmse = 0.0, qs = 0.0, crps = 0.0, es = 0.0, vs = 0.0;
};

struct MetricReport {
  std::vector<MetricRow> rows;
  std::string to_csv() const;   // header: model,mae,rmse,qs,crps,es,vs
  std::string to_text() const;  // aligned columns for terminals
};

MetricRow evaluate_model(const std::string& name,
                         const std::vector<Ensemble>& ensembles);

// Rows in input order; every model must be scored on identical conditions
// (same actuals in the same order).
MetricReport build_report(
    const std::vector<std::pair<std::string, const std::vector<Ensemble>*>>& models);

// Companion artifacts for plotting: per-quantile mean QS and per-slot mean
// CRPS, one row per (model, coordinate).
void write_qs_csv(const std::string& path,
                  const std::vector<std::pair<std::string, const std::vector<Ensemble>*>>& models);
void write_crps_csv(const std::string& path,
                    const std::vector<std::pair<std::string, const std::vector<Ensemble>*>>& models);

}  // namespace netdiff::eval
