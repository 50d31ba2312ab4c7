#pragma once

#include <vector>

#include "netdiff/rng.hpp"
#include "netdiff/tensor.hpp"

namespace netdiff::model {

// Linear variance schedule for the forward corruption chain.  Indices are
// 1-based to match the usual recurrences; alpha_bar(0) == 1 by definition.
struct ScheduleConfig {
  int n_steps = 500;
  double beta_start = 1e-6;
  double beta_end = 2e-2;
};

class NoiseSchedule {
 public:
  static NoiseSchedule build(const ScheduleConfig& cfg);

  int n_steps() const { return static_cast<int>(beta_.size()); }
  double beta(int n) const { return beta_[check(n) - 1]; }
  double alpha(int n) const { return 1.0 - beta(n); }
  // alpha_bar(n) = prod_{s<=n} (1 - beta_s); alpha_bar(0) = 1.
  double alpha_bar(int n) const;
  // Posterior noise scale; zero at n = 1 (the final denoising step is
  // deterministic).
  double sigma(int n) const;

  // Continuous noise level for training: pick n uniformly in {2..N}, then
  // draw sqrt(alpha_bar) uniformly between the levels at n-1 and n.
  double sample_noise_level(numerics::Rng& rng) const;

  // Closed-form forward corruption: sqrt_ab * x0 + sqrt(1 - ab) * eps,
  // elementwise over a (B, T) batch.
  static numerics::Tensor forward_diffuse(const numerics::Tensor& x0,
                                          const numerics::Tensor& eps,
                                          double sqrt_alpha_bar);
  // Same, with one noise level per batch row (size B).
  static numerics::Tensor forward_diffuse(const numerics::Tensor& x0,
                                          const numerics::Tensor& eps,
                                          const numerics::Tensor& levels);

 private:
  int check(int n) const;
  std::vector<double> beta_;
  std::vector<double> alpha_bar_;  // alpha_bar_[n-1] = alpha_bar(n)
};

}  // namespace netdiff::model
