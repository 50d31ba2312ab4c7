#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "netdiff/graph.hpp"
#include "netdiff/params.hpp"
#include "netdiff/tensor.hpp"

namespace netdiff::model {

enum class Variant { baseline, physics };

std::string variant_name(Variant v);        // "bdm" / "pdm"
Variant parse_variant(const std::string&);  // accepts bdm/pdm/baseline/physics

struct DenoiserConfig {
  Variant variant = Variant::baseline;
  int t = 96;    // profile length
  int h = 1000;  // hidden width
  int c = 79;    // condition dimension
  int l = 7;     // basis rows (physics variant)
  int heads = 4;
  int s_tok = 10;  // attention tokens; h = s_tok * token width
  double leaky_slope = 0.01;
  double k_scale = 5000.0;  // noise-level scale in the sinusoidal embedding

  void validate() const;  // ConfigError on indivisible dimensions
  bool physics() const { return variant == Variant::physics; }
};

// Parameter-free sinusoidal embedding of the noise level: position
// p = k_scale * sqrt_alpha_bar, interleaved sin/cos over h/2 geometric
// frequencies from 1 down to 1e-4.
numerics::Tensor positional_embedding(double sqrt_alpha_bar, int h, double k_scale);

// Conditional noise predictor.  Both variants share the recurrent trunk,
// token self-attention, main MLP and conditional embedding; the physics
// variant adds a multiplicative-gated embedding of the solar basis matrix.
// Parameters are initialized from (seed, name)-keyed streams, so the two
// variants start from bit-identical shared weights under the same seed.
class Denoiser {
 public:
  Denoiser(const DenoiserConfig& cfg, std::uint64_t seed);
  Denoiser(const DenoiserConfig& cfg, numerics::ParamSet params);

  const DenoiserConfig& config() const { return cfg_; }
  numerics::ParamSet& params() { return params_; }
  const numerics::ParamSet& params() const { return params_; }

  // Records the forward pass on g and returns the predicted-noise node of
  // shape (B, t).  x: (B, t); levels: one sqrt-alpha-bar per sample, size B;
  // y: (B, c); basis: flattened (B, l*t), required iff physics variant.
  numerics::Graph::NodeId forward(numerics::Graph& g, numerics::Graph::NodeId x,
                                  const numerics::Tensor& levels,
                                  const numerics::Tensor& y,
                                  const numerics::Tensor* basis) const;

  // Gradient-free evaluation.
  numerics::Tensor predict(const numerics::Tensor& x, const numerics::Tensor& levels,
                           const numerics::Tensor& y,
                           const numerics::Tensor* basis) const;

  void save(const std::string& path, const std::map<std::string, double>& extra = {}) const;
  static Denoiser load(const std::string& path);

 private:
  void check_params() const;
  DenoiserConfig cfg_;
  numerics::ParamSet params_;
};

}  // namespace netdiff::model
