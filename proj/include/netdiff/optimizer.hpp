#pragma once

#include <cstdint>
#include <unordered_map>

#include "netdiff/params.hpp"

namespace netdiff::numerics {

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double lr_decay = 0.9;             // multiplied into the rate every interval
  std::int64_t lr_decay_every = 1000;
};

// Bias-corrected adaptive-moment optimizer with a stepwise learning-rate
// decay schedule.  Moment buffers are created on first use and mirror the
// parameter shapes.
class Adam {
 public:
  explicit Adam(AdamConfig cfg) : cfg_(cfg), lr_(cfg.lr) {}

  // Applies one update from the gradients in params, then zeroes them.
  // Requires gradients to have been populated since the last step.
  void step(ParamSet& params);

  std::int64_t step_count() const { return step_; }
  double learning_rate() const { return lr_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  struct Moments {
    Tensor m, v;
  };
  AdamConfig cfg_;
  double lr_;
  std::int64_t step_ = 0;
  std::unordered_map<std::string, Moments> moments_;
};

}  // namespace netdiff::numerics
