#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "netdiff/tensor.hpp"

namespace netdiff::numerics {

// Named parameter tensors with matching gradient slots.  Iteration order is
// the registration order, which keeps gradient reductions and checkpoint
// layout deterministic.
class ParamSet {
 public:
  void add(const std::string& name, Tensor value);
  bool has(const std::string& name) const;
  Tensor& value(const std::string& name);
  const Tensor& value(const std::string& name) const;
  Tensor& grad(const std::string& name);
  const Tensor& grad(const std::string& name) const;

  const std::vector<std::string>& names() const { return order_; }
  std::size_t count() const { return order_.size(); }
  std::int64_t total_size() const;

  void zero_grads();
  void mark_grads_populated() { grads_populated_ = true; }
  bool grads_populated() const { return grads_populated_; }

  // Zeroes every parameter whose name starts with prefix.
  void zero_values_with_prefix(const std::string& prefix);

  void for_each(const std::function<void(const std::string&, Tensor&, Tensor&)>& fn);

 private:
  struct Slot {
    Tensor value;
    Tensor grad;
  };
  std::vector<std::string> order_;
  std::unordered_map<std::string, Slot> slots_;
  bool grads_populated_ = false;
};

struct CheckpointHeader {
  std::string module;  // e.g. "denoiser/bdm"
  std::int64_t h = 0, t = 0, c = 0, l = 0;
  std::map<std::string, double> extra;
};

// Self-describing binary checkpoint; float64 payload round-trips bit-exactly.
void save_checkpoint(const std::string& path, const CheckpointHeader& header,
                     const ParamSet& params);
std::pair<CheckpointHeader, ParamSet> load_checkpoint(const std::string& path);

}  // namespace netdiff::numerics
