#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "netdiff/denoiser.hpp"
#include "netdiff/optimizer.hpp"
#include "netdiff/schedule.hpp"

namespace netdiff::model {

// Pre-encoded training set: normalized profiles, condition vectors, and
// (physics variant only) flattened basis matrices, row-aligned.
struct TrainingData {
  numerics::Tensor x0;     // (n, T) in [-1, 1]
  numerics::Tensor y;      // (n, C)
  numerics::Tensor basis;  // (n, L*T); size 0 for the baseline variant

  std::int64_t count() const { return x0.rows(); }
};

struct TrainConfig {
  int steps = 3000;  // optimizer steps; "epochs" in the hyperparameter table
  int batch_size = 32;
  std::uint64_t seed = 1;
  double ema_mu = 0.9;  // smoothing factor: shadow = mu*shadow + (1-mu)*live
  numerics::AdamConfig adam;
  int log_every = 100;  // loss log granularity (steps)
};

struct TrainResult {
  std::vector<double> loss_log;  // mean loss per log_every window
  double first_window_loss = 0.0;
  double last_window_loss = 0.0;
};

struct SampleConfig {
  int m = 20;  // trajectories per condition
  std::uint64_t seed = 1;
  bool clip_iterates = true;  // clamp each reverse step to [-1, 1]
  bool use_ema = true;
};

// One weight-averaging step: shadow = mu*shadow + (1-mu)*live, name by name.
void ema_update(numerics::ParamSet& shadow, const numerics::ParamSet& live, double mu);

// Denoising model with its variance schedule: training loop, exponential
// moving average of the weights, and the ancestral reverse-time sampler.
class DiffusionModel {
 public:
  DiffusionModel(Denoiser denoiser, NoiseSchedule schedule);
  // Restores a trained model: live weights plus a previously saved shadow.
  DiffusionModel(Denoiser denoiser, NoiseSchedule schedule, numerics::ParamSet ema);

  Denoiser& denoiser() { return denoiser_; }
  const Denoiser& denoiser() const { return denoiser_; }
  const NoiseSchedule& schedule() const { return schedule_; }
  const numerics::ParamSet& ema() const { return ema_; }

  // One optimizer step on a random batch; returns the batch loss (mean
  // per-sample Euclidean norm of the noise-prediction error).
  double training_step(const TrainingData& data, numerics::Rng& rng,
                       numerics::Adam& opt, int batch_size);

  TrainResult train(const TrainingData& data, const TrainConfig& cfg,
                    const std::function<void(int, double)>& progress = nullptr);

  // M reverse-time trajectories for one condition row; returns (M, T) in
  // normalized units.  Trajectory k draws from its own stream, so results
  // are independent of batching and reproducible per (seed, k).
  numerics::Tensor sample(const numerics::Tensor& y_row,
                          const numerics::Tensor* basis_row,
                          const SampleConfig& cfg) const;

  // Batched variant over several conditions at once (better GEMM shapes).
  // y: (n_cond, C); basis: (n_cond, L*T) for the physics variant.  Returns
  // (n_cond * M, T) with rows grouped per condition; row c*M + k is
  // bit-identical to row k of sample() on condition c alone.
  numerics::Tensor sample_batch(const numerics::Tensor& y,
                                const numerics::Tensor* basis,
                                const SampleConfig& cfg) const;

 private:
  Denoiser denoiser_;
  NoiseSchedule schedule_;
  numerics::ParamSet ema_;
};

}  // namespace netdiff::model
