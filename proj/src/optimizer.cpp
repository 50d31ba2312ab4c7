#include "netdiff/optimizer.hpp"

#include <cmath>

#include "netdiff/errors.hpp"

namespace netdiff::numerics {

void Adam::step(ParamSet& params) {
  require(params.grads_populated(), "adam step before any backward pass");
  require(cfg_.lr > 0.0, "learning rate must be positive");
  params.for_each([](const std::string& name, Tensor&, Tensor& grad) {
    if (!grad.all_finite())
      throw NumericError("non-finite gradient for " + name);
  });
  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  params.for_each([&](const std::string& name, Tensor& value, Tensor& grad) {
    auto it = moments_.find(name);
    if (it == moments_.end()) {
      it = moments_.emplace(name, Moments{Tensor::zeros(value.shape()),
                                          Tensor::zeros(value.shape())}).first;
    }
    Tensor& m = it->second.m;
    Tensor& v = it->second.v;
    for (std::int64_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      value[i] -= lr_ * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  });
  params.zero_grads();
  if (cfg_.lr_decay_every > 0 && step_ % cfg_.lr_decay_every == 0) lr_ *= cfg_.lr_decay;
}

}  // namespace netdiff::numerics
