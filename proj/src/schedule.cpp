#include "netdiff/schedule.hpp"

#include <cmath>
#include <string>

#include "netdiff/errors.hpp"

namespace netdiff::model {

NoiseSchedule NoiseSchedule::build(const ScheduleConfig& cfg) {
  if (cfg.n_steps < 2) throw ConfigError("schedule: need at least 2 steps");
  if (!(cfg.beta_start > 0.0) || !(cfg.beta_end < 1.0) ||
      !(cfg.beta_start <= cfg.beta_end))
    throw ConfigError("schedule: betas must satisfy 0 < start <= end < 1");

  NoiseSchedule s;
  s.beta_.resize(cfg.n_steps);
  s.alpha_bar_.resize(cfg.n_steps);
  double prod = 1.0;
  for (int n = 1; n <= cfg.n_steps; ++n) {
    const double frac = static_cast<double>(n - 1) / (cfg.n_steps - 1);
    const double b = cfg.beta_start + frac * (cfg.beta_end - cfg.beta_start);
    s.beta_[n - 1] = b;
    prod *= 1.0 - b;
    s.alpha_bar_[n - 1] = prod;
  }
  return s;
}

int NoiseSchedule::check(int n) const {
  if (n < 1 || n > n_steps())
    throw ContractError("schedule: step index " + std::to_string(n) +
                        " outside [1, " + std::to_string(n_steps()) + "]");
  return n;
}

double NoiseSchedule::alpha_bar(int n) const {
  if (n == 0) return 1.0;
  return alpha_bar_[check(n) - 1];
}

double NoiseSchedule::sigma(int n) const {
  check(n);
  const double var = beta(n) * (1.0 - alpha_bar(n - 1)) / (1.0 - alpha_bar(n));
  return std::sqrt(var);
}

double NoiseSchedule::sample_noise_level(numerics::Rng& rng) const {
  const int n = static_cast<int>(rng.uniform_int(2, n_steps()));
  const double hi = std::sqrt(alpha_bar(n - 1));
  const double lo = std::sqrt(alpha_bar(n));
  return lo + (hi - lo) * rng.uniform01();
}

numerics::Tensor NoiseSchedule::forward_diffuse(const numerics::Tensor& x0,
                                                const numerics::Tensor& eps,
                                                double sqrt_alpha_bar) {
  if (!x0.same_shape(eps))
    throw ContractError("forward_diffuse: x0/eps shape mismatch");
  if (!(sqrt_alpha_bar > 0.0) || !(sqrt_alpha_bar <= 1.0))
    throw ContractError("forward_diffuse: noise level outside (0, 1]");
  const double a = sqrt_alpha_bar;
  const double b = std::sqrt(1.0 - a * a);
  numerics::Tensor out = x0;
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = a * x0[i] + b * eps[i];
  return out;
}

numerics::Tensor NoiseSchedule::forward_diffuse(const numerics::Tensor& x0,
                                                const numerics::Tensor& eps,
                                                const numerics::Tensor& levels) {
  if (!x0.same_shape(eps))
    throw ContractError("forward_diffuse: x0/eps shape mismatch");
  if (levels.size() != x0.rows())
    throw ContractError("forward_diffuse: one level per row required");
  numerics::Tensor out = x0;
  const std::int64_t cols = x0.cols();
  for (std::int64_t r = 0; r < x0.rows(); ++r) {
    const double a = levels[r];
    if (!(a > 0.0) || !(a <= 1.0))
      throw ContractError("forward_diffuse: noise level outside (0, 1]");
    const double b = std::sqrt(1.0 - a * a);
    for (std::int64_t c = 0; c < cols; ++c)
      out[r * cols + c] = a * x0[r * cols + c] + b * eps[r * cols + c];
  }
  return out;
}

}  // namespace netdiff::model
