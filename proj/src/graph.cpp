#include "netdiff/graph.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>

#include "netdiff/errors.hpp"

namespace netdiff::numerics {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<EMat>;
using CMap = Eigen::Map<const EMat>;

CMap mat(const Tensor& t) { return CMap(t.data(), t.rows(), t.cols()); }
Map mat(Tensor& t) { return Map(t.data(), t.rows(), t.cols()); }

}  // namespace

Graph::NodeId Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

const Tensor& Graph::value(NodeId id) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  return n.ext ? *n.ext : n.val;
}

const Tensor& Graph::grad(NodeId id) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  return n.grad.size() > 0 ? n.grad : zero_;
}

Tensor& Graph::grad_slot(NodeId id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.size() == 0) n.grad = Tensor::zeros(value(id).shape());
  return n.grad;
}

Graph::NodeId Graph::input(Tensor t) {
  Node n{.op = Op::input};
  n.val = std::move(t);
  return push(std::move(n));
}

Graph::NodeId Graph::param(const Tensor* t) {
  require(t != nullptr, "param leaf must reference storage");
  auto it = param_index_.find(t);
  if (it != param_index_.end()) return it->second;
  Node n{.op = Op::param, .needs_grad = true};
  n.ext = t;
  NodeId id = push(std::move(n));
  param_index_.emplace(t, id);
  return id;
}

const Tensor& Graph::grad_for(const Tensor* ext) const {
  auto it = param_index_.find(ext);
  return it == param_index_.end() ? zero_ : grad(it->second);
}

Graph::NodeId Graph::matmul(NodeId a, NodeId b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  require(A.cols() == B.rows(), "matmul: inner dimensions differ");
  Node n{.op = Op::matmul, .a = a, .b = b};
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  n.val = Tensor::zeros({A.rows(), B.cols()});
  mat(n.val).noalias() = mat(A) * mat(B);
  return push(std::move(n));
}

Graph::NodeId Graph::add(NodeId a, NodeId b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  require(A.size() == B.size() && A.rows() == B.rows(), "add: shape mismatch");
  Node n{.op = Op::add, .a = a, .b = b};
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  n.val = Tensor(A.shape());
  for (std::int64_t i = 0; i < A.size(); ++i) n.val[i] = A[i] + B[i];
  return push(std::move(n));
}

Graph::NodeId Graph::sub(NodeId a, NodeId b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  require(A.size() == B.size() && A.rows() == B.rows(), "sub: shape mismatch");
  Node n{.op = Op::sub, .a = a, .b = b};
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  n.val = Tensor(A.shape());
  for (std::int64_t i = 0; i < A.size(); ++i) n.val[i] = A[i] - B[i];
  return push(std::move(n));
}

Graph::NodeId Graph::mul(NodeId a, NodeId b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  require(A.size() == B.size() && A.rows() == B.rows(), "mul: shape mismatch");
  Node n{.op = Op::mul, .a = a, .b = b};
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  n.val = Tensor(A.shape());
  for (std::int64_t i = 0; i < A.size(); ++i) n.val[i] = A[i] * B[i];
  return push(std::move(n));
}

Graph::NodeId Graph::add_rowvec(NodeId a, NodeId b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  require(B.size() == A.cols(), "add_rowvec: bias length must equal cols");
  Node n{.op = Op::add_rowvec, .a = a, .b = b};
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  n.val = Tensor(A.shape());
  const std::int64_t rows = A.rows(), cols = A.cols();
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c)
      n.val[r * cols + c] = A[r * cols + c] + B[c];
  return push(std::move(n));
}

Graph::NodeId Graph::row_scale(NodeId a, NodeId s) {
  const Tensor& A = value(a);
  const Tensor& S = value(s);
  require(S.size() == A.rows(), "row_scale: one scale per row required");
  Node n{.op = Op::row_scale, .a = a, .b = s};
  n.needs_grad = nodes_[a].needs_grad || nodes_[s].needs_grad;
  n.val = Tensor(A.shape());
  const std::int64_t rows = A.rows(), cols = A.cols();
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c)
      n.val[r * cols + c] = A[r * cols + c] * S[r];
  return push(std::move(n));
}

Graph::NodeId Graph::scale(NodeId a, double c) {
  const Tensor& A = value(a);
  Node n{.op = Op::scale, .a = a, .c = c};
  n.needs_grad = nodes_[a].needs_grad;
  n.val = Tensor(A.shape());
  for (std::int64_t i = 0; i < A.size(); ++i) n.val[i] = A[i] * c;
  return push(std::move(n));
}

Graph::NodeId Graph::tanh_(NodeId a) {
  const Tensor& A = value(a);
  Node n{.op = Op::tanh_fn, .a = a};
  n.needs_grad = nodes_[a].needs_grad;
  n.val = Tensor(A.shape());
  for (std::int64_t i = 0; i < A.size(); ++i) n.val[i] = std::tanh(A[i]);
  return push(std::move(n));
}

Graph::NodeId Graph::sigmoid_(NodeId a) {
  const Tensor& A = value(a);
  Node n{.op = Op::sigmoid_fn, .a = a};
  n.needs_grad = nodes_[a].needs_grad;
  n.val = Tensor(A.shape());
  for (std::int64_t i = 0; i < A.size(); ++i) {
    const double x = A[i];
    if (x >= 0.0) {
      n.val[i] = 1.0 / (1.0 + std::exp(-x));
    } else {
      const double e = std::exp(x);
      n.val[i] = e / (1.0 + e);
    }
  }
  return push(std::move(n));
}

Graph::NodeId Graph::leaky_relu(NodeId a, double slope) {
  const Tensor& A = value(a);
  Node n{.op = Op::leaky, .a = a, .c = slope};
  n.needs_grad = nodes_[a].needs_grad;
  n.val = Tensor(A.shape());
  for (std::int64_t i = 0; i < A.size(); ++i) n.val[i] = A[i] > 0.0 ? A[i] : slope * A[i];
  return push(std::move(n));
}

Graph::NodeId Graph::sqrt_(NodeId a) {
  const Tensor& A = value(a);
  Node n{.op = Op::sqrt_fn, .a = a};
  n.needs_grad = nodes_[a].needs_grad;
  n.val = Tensor(A.shape());
  for (std::int64_t i = 0; i < A.size(); ++i) {
    if (A[i] < 0.0) throw NumericError("sqrt of negative value");
    n.val[i] = std::sqrt(A[i]);
  }
  return push(std::move(n));
}

Graph::NodeId Graph::softmax_rows(NodeId a) {
  const Tensor& A = value(a);
  Node n{.op = Op::softmax, .a = a};
  n.needs_grad = nodes_[a].needs_grad;
  n.val = Tensor(A.shape());
  const std::int64_t rows = A.rows(), cols = A.cols();
  require(cols > 0, "softmax over empty rows");
  for (std::int64_t r = 0; r < rows; ++r) {
    const double* x = A.data() + r * cols;
    double* y = n.val.data() + r * cols;
    double mx = x[0];
    for (std::int64_t c = 1; c < cols; ++c) mx = std::max(mx, x[c]);
    double z = 0.0;
    for (std::int64_t c = 0; c < cols; ++c) {
      y[c] = std::exp(x[c] - mx);
      z += y[c];
    }
    for (std::int64_t c = 0; c < cols; ++c) y[c] /= z;
  }
  return push(std::move(n));
}

Graph::NodeId Graph::reshape(NodeId a, std::vector<std::int64_t> shape) {
  const Tensor& A = value(a);
  Node n{.op = Op::reshape, .a = a};
  n.needs_grad = nodes_[a].needs_grad;
  n.val = A.reshaped(std::move(shape));
  return push(std::move(n));
}

Graph::NodeId Graph::transpose(NodeId a) {
  const Tensor& A = value(a);
  Node n{.op = Op::transpose, .a = a};
  n.needs_grad = nodes_[a].needs_grad;
  n.val = Tensor::zeros({A.cols(), A.rows()});
  mat(n.val) = mat(A).transpose();
  return push(std::move(n));
}

Graph::NodeId Graph::slice_rows(NodeId a, std::int64_t r0, std::int64_t r1) {
  const Tensor& A = value(a);
  require(0 <= r0 && r0 < r1 && r1 <= A.rows(), "slice_rows: bad range");
  Node n{.op = Op::slice_rows, .a = a, .i0 = r0, .i1 = r1};
  n.needs_grad = nodes_[a].needs_grad;
  const std::int64_t cols = A.cols();
  n.val = Tensor({r1 - r0, cols});
  std::copy(A.data() + r0 * cols, A.data() + r1 * cols, n.val.data());
  return push(std::move(n));
}

Graph::NodeId Graph::slice_cols(NodeId a, std::int64_t c0, std::int64_t c1) {
  const Tensor& A = value(a);
  require(0 <= c0 && c0 < c1 && c1 <= A.cols(), "slice_cols: bad range");
  Node n{.op = Op::slice_cols, .a = a, .i0 = c0, .i1 = c1};
  n.needs_grad = nodes_[a].needs_grad;
  const std::int64_t rows = A.rows(), cols = A.cols(), w = c1 - c0;
  n.val = Tensor({rows, w});
  for (std::int64_t r = 0; r < rows; ++r)
    std::copy(A.data() + r * cols + c0, A.data() + r * cols + c1, n.val.data() + r * w);
  return push(std::move(n));
}

Graph::NodeId Graph::concat_rows(std::span<const NodeId> parts) {
  require(!parts.empty(), "concat_rows: no inputs");
  const std::int64_t cols = value(parts[0]).cols();
  std::int64_t rows = 0;
  bool ng = false;
  for (NodeId p : parts) {
    require(value(p).cols() == cols, "concat_rows: column mismatch");
    rows += value(p).rows();
    ng = ng || nodes_[p].needs_grad;
  }
  Node n{.op = Op::concat_rows, .needs_grad = ng};
  n.extra.assign(parts.begin(), parts.end());
  n.val = Tensor({rows, cols});
  double* out = n.val.data();
  for (NodeId p : parts) {
    const Tensor& t = value(p);
    std::copy(t.data(), t.data() + t.size(), out);
    out += t.size();
  }
  return push(std::move(n));
}

Graph::NodeId Graph::concat_cols(std::span<const NodeId> parts) {
  require(!parts.empty(), "concat_cols: no inputs");
  const std::int64_t rows = value(parts[0]).rows();
  std::int64_t cols = 0;
  bool ng = false;
  for (NodeId p : parts) {
    require(value(p).rows() == rows, "concat_cols: row mismatch");
    cols += value(p).cols();
    ng = ng || nodes_[p].needs_grad;
  }
  Node n{.op = Op::concat_cols, .needs_grad = ng};
  n.extra.assign(parts.begin(), parts.end());
  n.val = Tensor({rows, cols});
  std::int64_t off = 0;
  for (NodeId p : parts) {
    const Tensor& t = value(p);
    const std::int64_t w = t.cols();
    for (std::int64_t r = 0; r < rows; ++r)
      std::copy(t.data() + r * w, t.data() + (r + 1) * w, n.val.data() + r * cols + off);
    off += w;
  }
  return push(std::move(n));
}

Graph::NodeId Graph::sum_all(NodeId a) {
  const Tensor& A = value(a);
  Node n{.op = Op::sum_all, .a = a};
  n.needs_grad = nodes_[a].needs_grad;
  double s = 0.0;
  for (std::int64_t i = 0; i < A.size(); ++i) s += A[i];
  n.val = Tensor({1, 1}, {s});
  return push(std::move(n));
}

Graph::NodeId Graph::sum_rows(NodeId a) {
  const Tensor& A = value(a);
  Node n{.op = Op::sum_rows, .a = a};
  n.needs_grad = nodes_[a].needs_grad;
  const std::int64_t rows = A.rows(), cols = A.cols();
  n.val = Tensor({rows, 1});
  for (std::int64_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::int64_t c = 0; c < cols; ++c) s += A[r * cols + c];
    n.val[r] = s;
  }
  return push(std::move(n));
}

void Graph::backward(NodeId loss) {
  require(loss >= 0 && static_cast<std::size_t>(loss) < nodes_.size(), "backward: bad node");
  require(value(loss).size() == 1, "backward: loss must be scalar");
  const double lv = value(loss)[0];
  if (!std::isfinite(lv)) throw NumericError("backward: loss is not finite");
  // Leaf gradients accumulate across calls; tape intermediates must not.
  for (Node& n : nodes_)
    if (n.op != Op::param && n.grad.size() != 0) n.grad.fill(0.0);
  grad_slot(loss)[0] += 1.0;
  for (NodeId id = loss; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    backprop_node(id);
  }
}

void Graph::backprop_node(NodeId id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  const Tensor& g = n.grad;
  auto want = [&](NodeId in) { return in >= 0 && nodes_[static_cast<std::size_t>(in)].needs_grad; };

  switch (n.op) {
    case Op::input:
    case Op::param:
      break;
    case Op::matmul: {
      const Tensor& A = value(n.a);
      const Tensor& B = value(n.b);
      if (want(n.a)) mat(grad_slot(n.a)).noalias() += mat(g) * mat(B).transpose();
      if (want(n.b)) mat(grad_slot(n.b)).noalias() += mat(A).transpose() * mat(g);
      break;
    }
    case Op::add: {
      if (want(n.a)) grad_slot(n.a).add_inplace(g.reshaped(value(n.a).shape()));
      if (want(n.b)) grad_slot(n.b).add_inplace(g.reshaped(value(n.b).shape()));
      break;
    }
    case Op::sub: {
      if (want(n.a)) grad_slot(n.a).add_inplace(g.reshaped(value(n.a).shape()));
      if (want(n.b)) {
        Tensor& gb = grad_slot(n.b);
        for (std::int64_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
      }
      break;
    }
    case Op::mul: {
      const Tensor& A = value(n.a);
      const Tensor& B = value(n.b);
      if (want(n.a)) {
        Tensor& ga = grad_slot(n.a);
        for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * B[i];
      }
      if (want(n.b)) {
        Tensor& gb = grad_slot(n.b);
        for (std::int64_t i = 0; i < g.size(); ++i) gb[i] += g[i] * A[i];
      }
      break;
    }
    case Op::add_rowvec: {
      const std::int64_t rows = g.rows(), cols = g.cols();
      if (want(n.a)) grad_slot(n.a).add_inplace(g);
      if (want(n.b)) {
        Tensor& gb = grad_slot(n.b);
        for (std::int64_t r = 0; r < rows; ++r)
          for (std::int64_t c = 0; c < cols; ++c) gb[c] += g[r * cols + c];
      }
      break;
    }
    case Op::row_scale: {
      const Tensor& A = value(n.a);
      const Tensor& S = value(n.b);
      const std::int64_t rows = A.rows(), cols = A.cols();
      if (want(n.a)) {
        Tensor& ga = grad_slot(n.a);
        for (std::int64_t r = 0; r < rows; ++r)
          for (std::int64_t c = 0; c < cols; ++c) ga[r * cols + c] += g[r * cols + c] * S[r];
      }
      if (want(n.b)) {
        Tensor& gs = grad_slot(n.b);
        for (std::int64_t r = 0; r < rows; ++r) {
          double s = 0.0;
          for (std::int64_t c = 0; c < cols; ++c) s += g[r * cols + c] * A[r * cols + c];
          gs[r] += s;
        }
      }
      break;
    }
    case Op::scale: {
      if (want(n.a)) {
        Tensor& ga = grad_slot(n.a);
        for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.c;
      }
      break;
    }
    case Op::tanh_fn: {
      if (want(n.a)) {
        Tensor& ga = grad_slot(n.a);
        for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - n.val[i] * n.val[i]);
      }
      break;
    }
    case Op::sigmoid_fn: {
      if (want(n.a)) {
        Tensor& ga = grad_slot(n.a);
        for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.val[i] * (1.0 - n.val[i]);
      }
      break;
    }
    case Op::leaky: {
      const Tensor& A = value(n.a);
      if (want(n.a)) {
        Tensor& ga = grad_slot(n.a);
        for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (A[i] > 0.0 ? 1.0 : n.c);
      }
      break;
    }
    case Op::sqrt_fn: {
      if (want(n.a)) {
        Tensor& ga = grad_slot(n.a);
        for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * 0.5 / n.val[i];
      }
      break;
    }
    case Op::softmax: {
      if (want(n.a)) {
        Tensor& ga = grad_slot(n.a);
        const std::int64_t rows = g.rows(), cols = g.cols();
        for (std::int64_t r = 0; r < rows; ++r) {
          const double* y = n.val.data() + r * cols;
          const double* gy = g.data() + r * cols;
          double dot = 0.0;
          for (std::int64_t c = 0; c < cols; ++c) dot += gy[c] * y[c];
          double* out = ga.data() + r * cols;
          for (std::int64_t c = 0; c < cols; ++c) out[c] += y[c] * (gy[c] - dot);
        }
      }
      break;
    }
    case Op::reshape: {
      if (want(n.a)) grad_slot(n.a).add_inplace(g.reshaped(value(n.a).shape()));
      break;
    }
    case Op::transpose: {
      if (want(n.a)) mat(grad_slot(n.a)) += mat(g).transpose();
      break;
    }
    case Op::slice_rows: {
      if (want(n.a)) {
        Tensor& ga = grad_slot(n.a);
        const std::int64_t cols = ga.cols();
        for (std::int64_t i = 0; i < g.size(); ++i) ga[n.i0 * cols + i] += g[i];
      }
      break;
    }
    case Op::slice_cols: {
      if (want(n.a)) {
        Tensor& ga = grad_slot(n.a);
        const std::int64_t cols = ga.cols(), w = n.i1 - n.i0;
        for (std::int64_t r = 0; r < g.rows(); ++r)
          for (std::int64_t c = 0; c < w; ++c) ga[r * cols + n.i0 + c] += g[r * w + c];
      }
      break;
    }
    case Op::concat_rows: {
      std::int64_t off = 0;
      for (NodeId p : n.extra) {
        const std::int64_t sz = value(p).size();
        if (want(p)) {
          Tensor& gp = grad_slot(p);
          for (std::int64_t i = 0; i < sz; ++i) gp[i] += g[off + i];
        }
        off += sz;
      }
      break;
    }
    case Op::concat_cols: {
      const std::int64_t rows = g.rows(), cols = g.cols();
      std::int64_t off = 0;
      for (NodeId p : n.extra) {
        const std::int64_t w = value(p).cols();
        if (want(p)) {
          Tensor& gp = grad_slot(p);
          for (std::int64_t r = 0; r < rows; ++r)
            for (std::int64_t c = 0; c < w; ++c) gp[r * w + c] += g[r * cols + off + c];
        }
        off += w;
      }
      break;
    }
    case Op::sum_all: {
      if (want(n.a)) {
        Tensor& ga = grad_slot(n.a);
        const double gv = g[0];
        for (std::int64_t i = 0; i < ga.size(); ++i) ga[i] += gv;
      }
      break;
    }
    case Op::sum_rows: {
      if (want(n.a)) {
        Tensor& ga = grad_slot(n.a);
        const std::int64_t rows = ga.rows(), cols = ga.cols();
        for (std::int64_t r = 0; r < rows; ++r)
          for (std::int64_t c = 0; c < cols; ++c) ga[r * cols + c] += g[r];
      }
      break;
    }
  }
}

}  // namespace netdiff::numerics
