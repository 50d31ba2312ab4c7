#include "netdiff/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "netdiff/errors.hpp"

namespace netdiff::model {

using numerics::Adam;
using numerics::Graph;
using numerics::ParamSet;
using numerics::Rng;
using numerics::Tensor;

DiffusionModel::DiffusionModel(Denoiser denoiser, NoiseSchedule schedule)
    : denoiser_(std::move(denoiser)), schedule_(std::move(schedule)) {
  // EMA shadow starts at the live weights.
  const ParamSet& live = denoiser_.params();
  for (const std::string& name : live.names()) ema_.add(name, live.value(name));
}

DiffusionModel::DiffusionModel(Denoiser denoiser, NoiseSchedule schedule,
                               ParamSet ema)
    : denoiser_(std::move(denoiser)),
      schedule_(std::move(schedule)),
      ema_(std::move(ema)) {
  const ParamSet& live = denoiser_.params();
  if (ema_.count() != live.count())
    throw ContractError("diffusion: EMA parameter count mismatch");
  for (const std::string& name : live.names()) {
    if (!ema_.has(name) || !ema_.value(name).same_shape(live.value(name)))
      throw ContractError("diffusion: EMA shape mismatch for " + name);
  }
}

namespace {

void check_data(const TrainingData& data, const DenoiserConfig& dc) {
  const std::int64_t n = data.count();
  if (n < 1) throw ContractError("train: empty dataset");
  if (data.x0.cols() != dc.t) throw ContractError("train: x0 width != t");
  if (data.y.rows() != n || data.y.cols() != dc.c)
    throw ContractError("train: conditions must be (n, c)");
  if (dc.physics()) {
    if (data.basis.rows() != n ||
        data.basis.cols() != static_cast<std::int64_t>(dc.l) * dc.t)
      throw ContractError("train: basis must be (n, l*t) for the physics variant");
  }
  if (!data.x0.all_finite() || !data.y.all_finite() ||
      (data.basis.size() > 0 && !data.basis.all_finite()))
    throw NumericError("train: non-finite training data");
}

void gather_rows(const Tensor& src, const std::vector<std::int64_t>& idx,
                 Tensor& dst) {
  const std::int64_t cols = src.cols();
  for (std::size_t i = 0; i < idx.size(); ++i)
    std::copy_n(src.data() + idx[i] * cols, cols,
                dst.data() + static_cast<std::int64_t>(i) * cols);
}

}  // namespace

void ema_update(ParamSet& shadow, const ParamSet& live, double mu) {
  if (!(mu >= 0.0 && mu < 1.0)) throw ConfigError("ema: smoothing must be in [0, 1)");
  if (shadow.count() != live.count())
    throw ContractError("ema: parameter count mismatch");
  for (const std::string& name : live.names()) {
    if (!shadow.has(name)) throw ContractError("ema: missing parameter " + name);
    Tensor& s = shadow.value(name);
    const Tensor& v = live.value(name);
    if (!s.same_shape(v)) throw ContractError("ema: shape mismatch for " + name);
    for (std::int64_t i = 0; i < s.size(); ++i)
      s[i] = mu * s[i] + (1.0 - mu) * v[i];
  }
}

double DiffusionModel::training_step(const TrainingData& data, Rng& rng, Adam& opt,
                                     int batch_size) {
  const DenoiserConfig& dc = denoiser_.config();
  check_data(data, dc);
  if (batch_size < 1) throw ConfigError("train: batch size must be positive");
  const std::int64_t n = data.count();
  const std::int64_t B = std::min<std::int64_t>(batch_size, n);

  // Batch indices (full pass when the batch covers the set), then noise
  // levels, then the noise itself — one fixed draw order.
  std::vector<std::int64_t> idx(static_cast<std::size_t>(B));
  if (B == n) {
    std::iota(idx.begin(), idx.end(), 0);
  } else {
    for (auto& i : idx) i = rng.uniform_int(0, n - 1);
  }
  Tensor levels({B});
  for (std::int64_t i = 0; i < B; ++i) levels[i] = schedule_.sample_noise_level(rng);
  Tensor eps({B, dc.t});
  for (std::int64_t i = 0; i < eps.size(); ++i) eps[i] = rng.normal();

  Tensor xb({B, dc.t}), yb({B, dc.c});
  gather_rows(data.x0, idx, xb);
  gather_rows(data.y, idx, yb);
  Tensor bb;
  if (dc.physics()) {
    bb = Tensor({B, static_cast<std::int64_t>(dc.l) * dc.t});
    gather_rows(data.basis, idx, bb);
  }

  Graph g;
  Graph::NodeId xn = g.input(NoiseSchedule::forward_diffuse(xb, eps, levels));
  Graph::NodeId eps_hat =
      denoiser_.forward(g, xn, levels, yb, dc.physics() ? &bb : nullptr);
  Graph::NodeId diff = g.sub(eps_hat, g.input(eps));
  // Mean over the batch of the per-sample Euclidean error norm.
  Graph::NodeId loss = g.scale(
      g.sum_all(g.sqrt_(g.sum_rows(g.mul(diff, diff)))), 1.0 / static_cast<double>(B));
  g.backward(loss);

  ParamSet& ps = denoiser_.params();
  for (const std::string& name : ps.names()) {
    const Tensor& gd = g.grad_for(&ps.value(name));
    if (gd.same_shape(ps.grad(name))) ps.grad(name).add_inplace(gd);
  }
  ps.mark_grads_populated();
  const double loss_value = g.value(loss)[0];
  opt.step(ps);
  return loss_value;
}

TrainResult DiffusionModel::train(const TrainingData& data, const TrainConfig& cfg,
                                  const std::function<void(int, double)>& progress) {
  if (cfg.steps < 1) throw ConfigError("train: steps must be positive");
  if (!(cfg.ema_mu >= 0.0 && cfg.ema_mu < 1.0))
    throw ConfigError("train: ema smoothing must be in [0, 1)");
  const int log_every = std::max(1, cfg.log_every);

  Rng rng(cfg.seed, numerics::kStreamTrainLoop);
  Adam opt(cfg.adam);
  TrainResult res;
  double acc = 0.0;
  int cnt = 0;
  for (int step = 1; step <= cfg.steps; ++step) {
    const double l = training_step(data, rng, opt, cfg.batch_size);
    if (!std::isfinite(l)) throw NumericError("train: loss diverged");

    ema_update(ema_, denoiser_.params(), cfg.ema_mu);

    acc += l;
    ++cnt;
    if (step % log_every == 0 || step == cfg.steps) {
      res.loss_log.push_back(acc / cnt);
      if (progress) progress(step, acc / cnt);
      acc = 0.0;
      cnt = 0;
    }
  }
  res.first_window_loss = res.loss_log.front();
  res.last_window_loss = res.loss_log.back();
  return res;
}

Tensor DiffusionModel::sample(const Tensor& y_row, const Tensor* basis_row,
                              const SampleConfig& cfg) const {
  const DenoiserConfig& dc = denoiser_.config();
  if (y_row.size() != dc.c) throw ContractError("sample: condition size != c");
  Tensor y({1, static_cast<std::int64_t>(dc.c)});
  for (std::int64_t j = 0; j < y.size(); ++j) y[j] = y_row[j];
  Tensor b;
  if (dc.physics() && basis_row != nullptr) {
    b = Tensor({1, basis_row->size()});
    for (std::int64_t j = 0; j < b.size(); ++j) b[j] = (*basis_row)[j];
  }
  return sample_batch(y, b.size() > 0 ? &b : nullptr, cfg);
}

Tensor DiffusionModel::sample_batch(const Tensor& y, const Tensor* basis,
                                    const SampleConfig& cfg) const {
  const DenoiserConfig& dc = denoiser_.config();
  if (cfg.m < 1) throw ConfigError("sample: need at least one trajectory");
  const std::int64_t NC = y.rows();
  if (NC < 1 || y.cols() != dc.c)
    throw ContractError("sample: conditions must be (n_cond, c)");
  const std::int64_t LT = static_cast<std::int64_t>(dc.l) * dc.t;
  if (dc.physics()) {
    if (basis == nullptr)
      throw ParseError("sample: physics variant requires basis profiles");
    if (basis->rows() != NC || basis->cols() != LT)
      throw ContractError("sample: basis must be (n_cond, l*t)");
  }

  std::optional<Denoiser> ema_net;
  const Denoiser* net = &denoiser_;
  if (cfg.use_ema) {
    ema_net.emplace(dc, ema_);
    net = &*ema_net;
  }

  // Trajectory k draws the same stream for every condition, so batching
  // conditions cannot change any individual trajectory.
  const std::int64_t M = cfg.m, T = dc.t, R = NC * M;
  std::vector<Rng> streams;
  streams.reserve(static_cast<std::size_t>(M));
  for (std::int64_t k = 0; k < M; ++k)
    streams.emplace_back(cfg.seed, numerics::kStreamTrajectoryBase +
                                       static_cast<std::uint64_t>(k));

  Tensor zk({M, T});
  for (std::int64_t i = 0; i < zk.size(); ++i)
    zk[i] = streams[static_cast<std::size_t>(i / T)].normal();
  Tensor x({R, T});
  for (std::int64_t c = 0; c < NC; ++c)
    std::copy_n(zk.data(), M * T, x.data() + c * M * T);

  Tensor yb({R, static_cast<std::int64_t>(dc.c)});
  for (std::int64_t c = 0; c < NC; ++c)
    for (std::int64_t k = 0; k < M; ++k)
      std::copy_n(y.data() + c * dc.c, dc.c, yb.data() + (c * M + k) * dc.c);
  Tensor bb;
  if (dc.physics()) {
    bb = Tensor({R, LT});
    for (std::int64_t c = 0; c < NC; ++c)
      for (std::int64_t k = 0; k < M; ++k)
        std::copy_n(basis->data() + c * LT, LT, bb.data() + (c * M + k) * LT);
  }

  Tensor levels({R});
  for (int n = schedule_.n_steps(); n >= 1; --n) {
    levels.fill(std::sqrt(schedule_.alpha_bar(n)));
    const Tensor eps_hat =
        net->predict(x, levels, yb, dc.physics() ? &bb : nullptr);
    const double c1 = 1.0 / std::sqrt(schedule_.alpha(n));
    const double c2 =
        (1.0 - schedule_.alpha(n)) / std::sqrt(1.0 - schedule_.alpha_bar(n));
    for (std::int64_t i = 0; i < x.size(); ++i)
      x[i] = c1 * (x[i] - c2 * eps_hat[i]);
    if (n > 1) {
      const double sigma = schedule_.sigma(n);
      for (std::int64_t i = 0; i < zk.size(); ++i)
        zk[i] = streams[static_cast<std::size_t>(i / T)].normal();
      for (std::int64_t c = 0; c < NC; ++c)
        for (std::int64_t i = 0; i < M * T; ++i)
          x[c * M * T + i] += sigma * zk[i];
    }
    if (cfg.clip_iterates)
      for (std::int64_t i = 0; i < x.size(); ++i)
        x[i] = std::clamp(x[i], -1.0, 1.0);
    if (!x.all_finite()) throw NumericError("sample: trajectory diverged");
  }
  return x;
}

}  // namespace netdiff::model
