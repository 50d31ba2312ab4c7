#include "netdiff/tensor.hpp"

#include <cmath>

#include "netdiff/errors.hpp"
#include "netdiff/rng.hpp"

namespace netdiff::numerics {

std::int64_t shape_size(const std::vector<std::int64_t>& shape) {
  require(!shape.empty(), "tensor shape must have at least one dim");
  std::int64_t n = 1;
  for (auto d : shape) {
    require(d >= 0, "tensor dims must be non-negative");
    n *= d;
  }
  return n;
}

Tensor::Tensor(std::vector<std::int64_t> shape)
    : shape_(std::move(shape)), v_(static_cast<std::size_t>(shape_size(shape_)), 0.0) {}

Tensor::Tensor(std::vector<std::int64_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), v_(std::move(values)) {
  require(shape_size(shape_) == static_cast<std::int64_t>(v_.size()),
          "tensor value count does not match shape");
}

Tensor Tensor::zeros(std::vector<std::int64_t> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(std::vector<std::int64_t> shape, double v) {
  Tensor t(std::move(shape));
  t.fill(v);
  return t;
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::gaussian(Rng& rng, std::vector<std::int64_t> shape) {
  Tensor t(std::move(shape));
  for (auto& x : t.v_) x = rng.normal();
  return t;
}

std::int64_t Tensor::rows() const { return shape_.empty() ? 1 : shape_[0]; }

std::int64_t Tensor::cols() const {
  const std::int64_t r = rows();
  return r == 0 ? 0 : size() / r;
}

bool Tensor::all_finite() const {
  for (double x : v_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

Tensor Tensor::reshaped(std::vector<std::int64_t> shape) const {
  require(shape_size(shape) == size(), "reshape must preserve element count");
  Tensor t;
  t.shape_ = std::move(shape);
  t.v_ = v_;
  return t;
}

void Tensor::fill(double v) {
  for (auto& x : v_) x = v;
}

void Tensor::add_inplace(const Tensor& other) {
  require(same_shape(other), "add_inplace: shape mismatch");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += other.v_[i];
}

}  // namespace netdiff::numerics
