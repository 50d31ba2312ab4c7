#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace netdiff::numerics {

class Rng;

// Dense row-major float64 tensor.  Most graph operations view it as a
// (rows, cols) matrix: rows = shape[0], cols = size / shape[0].
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::int64_t> shape);
  Tensor(std::vector<std::int64_t> shape, std::vector<double> values);

  static Tensor zeros(std::vector<std::int64_t> shape);
  static Tensor full(std::vector<std::int64_t> shape, double v);
  static Tensor scalar(double v);
  static Tensor gaussian(Rng& rng, std::vector<std::int64_t> shape);

  const std::vector<std::int64_t>& shape() const { return shape_; }
  std::int64_t size() const { return static_cast<std::int64_t>(v_.size()); }
  std::int64_t dim(std::size_t i) const { return shape_[i]; }
  std::size_t ndim() const { return shape_.size(); }

  // Matrix view dimensions (scalars count as 1x1, vectors as 1xN).
  std::int64_t rows() const;
  std::int64_t cols() const;

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  double& operator[](std::int64_t i) { return v_[static_cast<std::size_t>(i)]; }
  double operator[](std::int64_t i) const { return v_[static_cast<std::size_t>(i)]; }
  double& at(std::int64_t r, std::int64_t c) { return v_[static_cast<std::size_t>(r * cols() + c)]; }
  double at(std::int64_t r, std::int64_t c) const { return v_[static_cast<std::size_t>(r * cols() + c)]; }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  bool all_finite() const;
  Tensor reshaped(std::vector<std::int64_t> shape) const;

  void fill(double v);
  // this += other (shapes must match).
  void add_inplace(const Tensor& other);

 private:
  std::vector<std::int64_t> shape_;
  std::vector<double> v_;
};

std::int64_t shape_size(const std::vector<std::int64_t>& shape);

}  // namespace netdiff::numerics
