#pragma once

#include <string>
#include <vector>

#include "netdiff/config.hpp"
#include "netdiff/data.hpp"
#include "netdiff/diffusion.hpp"
#include "netdiff/metrics.hpp"
#include "netdiff/solar.hpp"

namespace netdiff::pipeline {

// Config -> typed sub-configurations (defaults per the hyperparameter table).
model::DenoiserConfig denoiser_config_from(const Config& cfg);
model::ScheduleConfig schedule_config_from(const Config& cfg);
model::TrainConfig train_config_from(const Config& cfg);
model::SampleConfig sample_config_from(const Config& cfg);
solar::Site site_from(const Config& cfg);

struct LoadedData {
  data::Dataset dataset;
  data::DatasetSplit split;
};
LoadedData load_and_split(const Config& cfg);

// Rows encoded for training/evaluation, aligned with profile indices.
struct Encoded {
  model::TrainingData rows;
  std::vector<std::size_t> profile_rows;
};
Encoded encode_set(const data::Dataset& ds, const std::vector<std::size_t>& rows,
                   const Config& cfg);

// Checkpoint paths: live weights and the EMA shadow.
std::string checkpoint_path(const Config& cfg, model::Variant v, bool ema);

// Samples every encoded condition (in chunks) and denormalizes against the
// per-customer bounds; one ensemble per condition row.
std::vector<eval::Ensemble> make_ensembles(const model::DiffusionModel& dm,
                                           const data::Dataset& ds,
                                           const Encoded& test,
                                           const model::SampleConfig& scfg);

// Commands (throw on failure; the C API maps exceptions to codes).
void run_basis(const Config& cfg);
void run_synth_data(const Config& cfg);
void run_train(const Config& cfg);
void run_sample(const Config& cfg);
void run_evaluate(const Config& cfg);
void run_report(const Config& cfg);

}  // namespace netdiff::pipeline
