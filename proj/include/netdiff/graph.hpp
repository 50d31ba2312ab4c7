#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "netdiff/tensor.hpp"

namespace netdiff::numerics {

// Reverse-mode autodiff tape over 2-D tensors.  Forward values are computed
// eagerly as ops are recorded; backward() walks the tape in reverse and
// accumulates gradients into the leaves.  One Graph instance is built per
// forward pass and thrown away afterwards; parameter leaves reference
// external storage that must outlive the graph.
class Graph {
 public:
  using NodeId = std::int32_t;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Leaf holding a copy of t; does not receive gradients.
  NodeId input(Tensor t);
  // Leaf referencing external parameter storage; receives gradients.
  // Repeated calls for the same pointer return the same node.
  NodeId param(const Tensor* t);

  NodeId matmul(NodeId a, NodeId b);
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);  // elementwise
  // A + broadcast row vector b (bias add).
  NodeId add_rowvec(NodeId a, NodeId b);
  // Row i of a scaled by s[i]; s has one entry per row of a.
  NodeId row_scale(NodeId a, NodeId s);
  NodeId scale(NodeId a, double c);
  NodeId tanh_(NodeId a);
  NodeId sigmoid_(NodeId a);
  NodeId leaky_relu(NodeId a, double slope);
  NodeId sqrt_(NodeId a);
  NodeId softmax_rows(NodeId a);
  NodeId reshape(NodeId a, std::vector<std::int64_t> shape);
  NodeId transpose(NodeId a);
  NodeId slice_rows(NodeId a, std::int64_t r0, std::int64_t r1);
  NodeId slice_cols(NodeId a, std::int64_t c0, std::int64_t c1);
  NodeId concat_rows(std::span<const NodeId> parts);
  NodeId concat_cols(std::span<const NodeId> parts);
  NodeId sum_all(NodeId a);   // -> 1x1
  NodeId sum_rows(NodeId a);  // (m,n) -> (m,1)

  const Tensor& value(NodeId id) const;
  // Gradient of the last backward() target w.r.t. node id; zero tensor if the
  // node is unreachable from the loss.
  const Tensor& grad(NodeId id) const;
  // Gradient for a param leaf looked up by its external storage pointer.
  const Tensor& grad_for(const Tensor* ext) const;

  // loss must be scalar and finite; gradients accumulate across calls.
  void backward(NodeId loss);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op : std::uint8_t {
    input, param, matmul, add, sub, mul, add_rowvec, row_scale, scale,
    tanh_fn, sigmoid_fn, leaky, sqrt_fn, softmax, reshape, transpose,
    slice_rows, slice_cols, concat_rows, concat_cols, sum_all, sum_rows,
  };

  struct Node {
    Op op;
    bool needs_grad = false;
    NodeId a = -1, b = -1;
    std::vector<NodeId> extra = {};  // concat inputs
    std::int64_t i0 = 0, i1 = 0;
    double c = 0.0;
    const Tensor* ext = nullptr;  // param leaves
    Tensor val = {};
    Tensor grad = {};
  };

  NodeId push(Node n);
  Tensor& grad_slot(NodeId id);
  void backprop_node(NodeId id);

  std::vector<Node> nodes_;
  std::unordered_map<const Tensor*, NodeId> param_index_;
  Tensor zero_ = Tensor::scalar(0.0);
};

}  // namespace netdiff::numerics
