#include "netdiff/denoiser.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "netdiff/errors.hpp"
#include "netdiff/rng.hpp"

namespace netdiff::model {

using numerics::Graph;
using numerics::ParamSet;
using numerics::Rng;
using numerics::Tensor;

std::string variant_name(Variant v) {
  return v == Variant::baseline ? "bdm" : "pdm";
}

Variant parse_variant(const std::string& s) {
  if (s == "bdm" || s == "baseline") return Variant::baseline;
  if (s == "pdm" || s == "physics") return Variant::physics;
  throw ConfigError("unknown variant '" + s + "' (expected bdm or pdm)");
}

void DenoiserConfig::validate() const {
  if (t < 1 || h < 2 || c < 1) throw ConfigError("denoiser: t/h/c must be positive");
  if (h % 2 != 0) throw ConfigError("denoiser: h must be even");
  if (s_tok < 1 || h % s_tok != 0)
    throw ConfigError("denoiser: h must be divisible by s_tok");
  const int d = h / s_tok;
  if (heads < 1 || d % heads != 0)
    throw ConfigError("denoiser: token width h/s_tok must be divisible by heads");
  if (physics() && l < 1) throw ConfigError("denoiser: physics variant needs l >= 1");
  if (!(k_scale > 0.0)) throw ConfigError("denoiser: k_scale must be positive");
}

Tensor positional_embedding(double sqrt_alpha_bar, int h, double k_scale) {
  if (h < 2 || h % 2 != 0) throw ContractError("positional_embedding: h must be even");
  if (!(sqrt_alpha_bar > 0.0) || !(sqrt_alpha_bar <= 1.0))
    throw ContractError("positional_embedding: noise level outside (0, 1]");
  const double p = k_scale * sqrt_alpha_bar;
  const int half = h / 2;
  Tensor e({h});
  for (int j = 0; j < half; ++j) {
    // Geometric frequency ladder from 1 down to 1e-4.
    const double w = half > 1 ? std::pow(1e-4, static_cast<double>(j) / (half - 1)) : 1.0;
    e[2 * j] = std::sin(p * w);
    e[2 * j + 1] = std::cos(p * w);
  }
  return e;
}

namespace {

Tensor init_tensor(const std::string& name, std::vector<std::int64_t> shape,
                   std::int64_t fan_in, std::uint64_t seed) {
  Rng rng(seed, numerics::stream_id("init/" + name));
  Tensor t = Tensor::gaussian(rng, std::move(shape));
  const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (std::int64_t i = 0; i < t.size(); ++i) t[i] *= s;
  return t;
}

void add_affine(ParamSet& p, const std::string& w, const std::string& b,
                std::int64_t in, std::int64_t out, std::uint64_t seed) {
  p.add(w, init_tensor(w, {in, out}, in, seed));
  p.add(b, Tensor::zeros({out}));
}

ParamSet init_params(const DenoiserConfig& cfg, std::uint64_t seed) {
  ParamSet p;
  const std::int64_t H = cfg.h, T = cfg.t, C = cfg.c;
  const std::int64_t d = cfg.h / cfg.s_tok;
  p.add("lstm.w_ih", init_tensor("lstm.w_ih", {1, 4 * H}, 1, seed));
  p.add("lstm.w_hh", init_tensor("lstm.w_hh", {H, 4 * H}, H, seed));
  p.add("lstm.b", Tensor::zeros({4 * H}));
  p.add("attn.wq", init_tensor("attn.wq", {d, d}, d, seed));
  p.add("attn.wk", init_tensor("attn.wk", {d, d}, d, seed));
  p.add("attn.wv", init_tensor("attn.wv", {d, d}, d, seed));
  p.add("attn.wo", init_tensor("attn.wo", {d, d}, d, seed));
  add_affine(p, "mlp.w1", "mlp.b1", H, H, seed);
  add_affine(p, "mlp.w2", "mlp.b2", H, H, seed);
  add_affine(p, "cond.w1", "cond.b1", C, H, seed);
  add_affine(p, "cond.w2", "cond.b2", H, H, seed);
  if (cfg.physics()) {
    const std::int64_t LT = static_cast<std::int64_t>(cfg.l) * T;
    add_affine(p, "pv.basis.w1", "pv.basis.b1", LT, H, seed);
    add_affine(p, "pv.basis.w2", "pv.basis.b2", H, H, seed);
    add_affine(p, "pv.basis.w3", "pv.basis.b3", H, H, seed);
    add_affine(p, "pv.cond.w1", "pv.cond.b1", C, H, seed);
    add_affine(p, "pv.cond.w2", "pv.cond.b2", H, H, seed);
  }
  // Zero-initialized head keeps the initial prediction small.
  p.add("out.w", Tensor::zeros({H, T}));
  p.add("out.b", Tensor::zeros({T}));
  return p;
}

}  // namespace

Denoiser::Denoiser(const DenoiserConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  params_ = init_params(cfg_, seed);
}

Denoiser::Denoiser(const DenoiserConfig& cfg, ParamSet params)
    : cfg_(cfg), params_(std::move(params)) {
  cfg_.validate();
  check_params();
}

void Denoiser::check_params() const {
  ParamSet expected = init_params(cfg_, 0);
  if (expected.count() != params_.count())
    throw ContractError("denoiser: parameter count mismatch for config");
  for (const std::string& name : expected.names()) {
    if (!params_.has(name))
      throw ContractError("denoiser: missing parameter " + name);
    if (!params_.value(name).same_shape(expected.value(name)))
      throw ContractError("denoiser: shape mismatch for " + name);
    if (!params_.value(name).all_finite())
      throw NumericError("denoiser: non-finite values in " + name);
  }
}

Graph::NodeId Denoiser::forward(Graph& g, Graph::NodeId x, const Tensor& levels,
                                const Tensor& y, const Tensor* basis) const {
  const Tensor& xv = g.value(x);
  const std::int64_t B = xv.rows();
  const std::int64_t H = cfg_.h, T = cfg_.t, C = cfg_.c;
  if (xv.cols() != T) throw ContractError("denoiser: input width != t");
  if (levels.size() != B) throw ContractError("denoiser: one noise level per sample");
  if (y.rows() != B || y.cols() != C)
    throw ContractError("denoiser: conditions must be (B, c)");
  if (cfg_.physics()) {
    if (basis == nullptr)
      throw ParseError("denoiser: physics variant requires basis profiles");
    if (basis->rows() != B || basis->cols() != static_cast<std::int64_t>(cfg_.l) * T)
      throw ContractError("denoiser: basis must be (B, l*t)");
  }

  auto P = [&](const char* name) { return g.param(&params_.value(name)); };
  auto affine = [&](Graph::NodeId in, const char* w, const char* b) {
    return g.add_rowvec(g.matmul(in, P(w)), P(b));
  };

  // Recurrent trunk over the T scalar inputs; final hidden state only.
  const Graph::NodeId w_ih = P("lstm.w_ih"), w_hh = P("lstm.w_hh"), b_g = P("lstm.b");
  Graph::NodeId hs = g.input(Tensor::zeros({B, H}));
  Graph::NodeId cs = g.input(Tensor::zeros({B, H}));
  for (std::int64_t t = 0; t < T; ++t) {
    Graph::NodeId xt = g.slice_cols(x, t, t + 1);  // (B,1)
    Graph::NodeId gates = g.add_rowvec(
        g.add(g.matmul(xt, w_ih), g.matmul(hs, w_hh)), b_g);  // (B,4H)
    Graph::NodeId gi = g.sigmoid_(g.slice_cols(gates, 0, H));
    Graph::NodeId gf = g.sigmoid_(g.slice_cols(gates, H, 2 * H));
    Graph::NodeId gc = g.tanh_(g.slice_cols(gates, 2 * H, 3 * H));
    Graph::NodeId go = g.sigmoid_(g.slice_cols(gates, 3 * H, 4 * H));
    cs = g.add(g.mul(gf, cs), g.mul(gi, gc));
    hs = g.mul(go, g.tanh_(cs));
  }

  // Noise-level embedding, one row per sample (parameter-free).
  Tensor pos({B, H});
  for (std::int64_t i = 0; i < B; ++i) {
    Tensor e = positional_embedding(levels[i], cfg_.h, cfg_.k_scale);
    for (std::int64_t j = 0; j < H; ++j) pos.at(i, j) = e[j];
  }
  Graph::NodeId h = g.add(hs, g.input(std::move(pos)));

  // Token self-attention with residual: rows b*s_tok..(b+1)*s_tok-1 hold the
  // tokens of sample b after the reshape.
  const std::int64_t S = cfg_.s_tok, d = H / S, dh = d / cfg_.heads;
  Graph::NodeId tok = g.reshape(h, {B * S, d});
  Graph::NodeId q = g.matmul(tok, P("attn.wq"));
  Graph::NodeId k = g.matmul(tok, P("attn.wk"));
  Graph::NodeId v = g.matmul(tok, P("attn.wv"));
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Graph::NodeId> sample_outs;
  sample_outs.reserve(static_cast<std::size_t>(B));
  std::vector<Graph::NodeId> head_outs;
  for (std::int64_t b = 0; b < B; ++b) {
    Graph::NodeId qb = g.slice_rows(q, b * S, (b + 1) * S);
    Graph::NodeId kb = g.slice_rows(k, b * S, (b + 1) * S);
    Graph::NodeId vb = g.slice_rows(v, b * S, (b + 1) * S);
    head_outs.clear();
    for (int m = 0; m < cfg_.heads; ++m) {
      Graph::NodeId qh = g.slice_cols(qb, m * dh, (m + 1) * dh);
      Graph::NodeId kh = g.slice_cols(kb, m * dh, (m + 1) * dh);
      Graph::NodeId vh = g.slice_cols(vb, m * dh, (m + 1) * dh);
      Graph::NodeId att =
          g.softmax_rows(g.scale(g.matmul(qh, g.transpose(kh)), inv_sqrt_dh));
      head_outs.push_back(g.matmul(att, vh));  // (S,dh)
    }
    sample_outs.push_back(g.concat_cols(head_outs));  // (S,d)
  }
  Graph::NodeId attn_out = g.matmul(g.concat_rows(sample_outs), P("attn.wo"));
  h = g.reshape(g.add(tok, attn_out), {B, H});

  // Main MLP keeps width H.
  h = g.leaky_relu(affine(h, "mlp.w1", "mlp.b1"), cfg_.leaky_slope);
  h = affine(h, "mlp.w2", "mlp.b2");

  // Conditional embedding joins additively.
  Graph::NodeId yn = g.input(y);
  Graph::NodeId cond =
      affine(g.leaky_relu(affine(yn, "cond.w1", "cond.b1"), cfg_.leaky_slope),
             "cond.w2", "cond.b2");
  h = g.add(h, cond);

  if (cfg_.physics()) {
    // Gated solar embedding: tanh MLP over the flattened basis matrix,
    // multiplied elementwise by a tanh MLP over the conditions.
    Graph::NodeId bn = g.input(*basis);
    Graph::NodeId pb = g.tanh_(affine(bn, "pv.basis.w1", "pv.basis.b1"));
    pb = g.tanh_(affine(pb, "pv.basis.w2", "pv.basis.b2"));
    pb = g.tanh_(affine(pb, "pv.basis.w3", "pv.basis.b3"));
    Graph::NodeId pc = g.tanh_(affine(yn, "pv.cond.w1", "pv.cond.b1"));
    pc = g.tanh_(affine(pc, "pv.cond.w2", "pv.cond.b2"));
    h = g.add(h, g.mul(pb, pc));
  }

  return affine(h, "out.w", "out.b");  // (B,T)
}

Tensor Denoiser::predict(const Tensor& x, const Tensor& levels, const Tensor& y,
                         const Tensor* basis) const {
  Graph g;
  Graph::NodeId out = forward(g, g.input(x), levels, y, basis);
  return g.value(out);
}

void Denoiser::save(const std::string& path,
                    const std::map<std::string, double>& extra) const {
  numerics::CheckpointHeader hd;
  hd.module = "denoiser/" + variant_name(cfg_.variant);
  hd.h = cfg_.h;
  hd.t = cfg_.t;
  hd.c = cfg_.c;
  hd.l = cfg_.l;
  hd.extra = extra;
  hd.extra["heads"] = cfg_.heads;
  hd.extra["s_tok"] = cfg_.s_tok;
  hd.extra["leaky_slope"] = cfg_.leaky_slope;
  hd.extra["k_scale"] = cfg_.k_scale;
  numerics::save_checkpoint(path, hd, params_);
}

Denoiser Denoiser::load(const std::string& path) {
  auto [hd, params] = numerics::load_checkpoint(path);
  DenoiserConfig cfg;
  if (hd.module == "denoiser/bdm") {
    cfg.variant = Variant::baseline;
  } else if (hd.module == "denoiser/pdm") {
    cfg.variant = Variant::physics;
  } else {
    throw ParseError("checkpoint is not a denoiser: " + hd.module);
  }
  cfg.h = static_cast<int>(hd.h);
  cfg.t = static_cast<int>(hd.t);
  cfg.c = static_cast<int>(hd.c);
  cfg.l = static_cast<int>(hd.l);
  auto take = [&](const char* key, double fallback) {
    auto it = hd.extra.find(key);
    return it == hd.extra.end() ? fallback : it->second;
  };
  cfg.heads = static_cast<int>(take("heads", 4));
  cfg.s_tok = static_cast<int>(take("s_tok", 10));
  cfg.leaky_slope = take("leaky_slope", 0.01);
  cfg.k_scale = take("k_scale", 5000.0);
  return Denoiser(cfg, std::move(params));
}

}  // namespace netdiff::model
