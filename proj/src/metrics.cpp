#include "netdiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "netdiff/csv.hpp"
#include "netdiff/errors.hpp"

namespace netdiff::eval {

using numerics::Tensor;

void Ensemble::validate() const {
  if (m() < 1) throw ContractError("ensemble: need at least one sample");
  if (static_cast<std::int64_t>(actual.size()) != t())
    throw ContractError("ensemble: actual length must match sample width");
  if (!samples.all_finite()) throw NumericError("ensemble: non-finite sample");
  for (double v : actual)
    if (!std::isfinite(v)) throw NumericError("ensemble: non-finite actual");
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ContractError("quantile of empty set");
  if (!(q > 0.0 && q < 1.0)) throw ContractError("quantile level outside (0,1)");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

Tensor mse_per_time(const Ensemble& e) {
  e.validate();
  const std::int64_t M = e.m(), T = e.t();
  Tensor out = Tensor::zeros({T});
  for (std::int64_t i = 0; i < M; ++i)
    for (std::int64_t t = 0; t < T; ++t) {
      const double d = e.samples.at(i, t) - e.actual[static_cast<std::size_t>(t)];
      out[t] += d * d;
    }
  for (std::int64_t t = 0; t < T; ++t) out[t] /= static_cast<double>(M);
  return out;
}

double quantile_score(const Ensemble& e, double q) {
  e.validate();
  const std::int64_t M = e.m(), T = e.t();
  double acc = 0.0;
  std::vector<double> col(static_cast<std::size_t>(M));
  for (std::int64_t t = 0; t < T; ++t) {
    for (std::int64_t i = 0; i < M; ++i) col[static_cast<std::size_t>(i)] = e.samples.at(i, t);
    const double yq = empirical_quantile(col, q);
    const double u = e.actual[static_cast<std::size_t>(t)] - yq;
    acc += u * (q - (u < 0.0 ? 1.0 : 0.0));
  }
  return acc / static_cast<double>(T);
}

Tensor crps_per_time(const Ensemble& e) {
  e.validate();
  const std::int64_t M = e.m(), T = e.t();
  Tensor out = Tensor::zeros({T});
  for (std::int64_t t = 0; t < T; ++t) {
    double acc = 0.0, spread = 0.0;
    for (std::int64_t i = 0; i < M; ++i) {
      acc += std::abs(e.samples.at(i, t) - e.actual[static_cast<std::size_t>(t)]);
      for (std::int64_t j = 0; j < M; ++j)
        spread += std::abs(e.samples.at(i, t) - e.samples.at(j, t));
    }
    out[t] = acc / static_cast<double>(M) -
             spread / (2.0 * static_cast<double>(M) * static_cast<double>(M));
  }
  return out;
}

double crps_mean(const Ensemble& e) {
  const Tensor per = crps_per_time(e);
  double acc = 0.0;
  for (std::int64_t t = 0; t < per.size(); ++t) acc += per[t];
  return acc / static_cast<double>(per.size());
}

double energy_score(const Ensemble& e) {
  e.validate();
  const std::int64_t M = e.m(), T = e.t();
  if (M < 2) throw ContractError("energy score needs at least two members");
  auto dist = [&](std::int64_t i, std::int64_t j) {
    double s = 0.0;
    for (std::int64_t t = 0; t < T; ++t) {
      const double d = e.samples.at(i, t) - e.samples.at(j, t);
      s += d * d;
    }
    return std::sqrt(s);
  };
  double first = 0.0;
  for (std::int64_t i = 0; i < M; ++i) {
    double s = 0.0;
    for (std::int64_t t = 0; t < T; ++t) {
      const double d = e.samples.at(i, t) - e.actual[static_cast<std::size_t>(t)];
      s += d * d;
    }
    first += std::sqrt(s);
  }
  double second = 0.0;
  for (std::int64_t i = 0; i < M; ++i)
    for (std::int64_t j = 0; j < M; ++j) second += dist(i, j);
  return first / static_cast<double>(M) -
         second / (2.0 * static_cast<double>(M) * static_cast<double>(M));
}

double variogram_score(const Ensemble& e, double gamma) {
  e.validate();
  if (!(gamma > 0.0)) throw ContractError("variogram exponent must be positive");
  const std::int64_t M = e.m(), T = e.t();
  double acc = 0.0;
  for (std::int64_t t = 0; t < T; ++t)
    for (std::int64_t u = t + 1; u < T; ++u) {
      const double obs = std::pow(
          std::abs(e.actual[static_cast<std::size_t>(t)] - e.actual[static_cast<std::size_t>(u)]),
          gamma);
      // Averaging the per-member gaps (not the raw variograms) keeps the
      // score exactly zero when every member matches the observation.
      double gap = 0.0;
      for (std::int64_t i = 0; i < M; ++i)
        gap += obs - std::pow(std::abs(e.samples.at(i, t) - e.samples.at(i, u)), gamma);
      gap /= static_cast<double>(M);
      acc += gap * gap;
    }
  return acc;
}

PooledErrors mae_rmse(const std::vector<Ensemble>& ensembles) {
  if (ensembles.empty()) throw ContractError("mae_rmse: no ensembles");
  double abs_acc = 0.0, sq_acc = 0.0;
  std::int64_t count = 0;
  for (const Ensemble& e : ensembles) {
    e.validate();
    for (std::int64_t i = 0; i < e.m(); ++i)
      for (std::int64_t t = 0; t < e.t(); ++t) {
        const double d = e.samples.at(i, t) - e.actual[static_cast<std::size_t>(t)];
        abs_acc += std::abs(d);
        sq_acc += d * d;
        ++count;
      }
  }
  PooledErrors p;
  p.mae = abs_acc / static_cast<double>(count);
  p.rmse = std::sqrt(sq_acc / static_cast<double>(count));
  return p;
}

MetricRow evaluate_model(const std::string& name,
                         const std::vector<Ensemble>& ensembles) {
  if (ensembles.empty()) throw ContractError("evaluate_model: no ensembles");
  MetricRow row;
  row.model = name;
  const PooledErrors pooled = mae_rmse(ensembles);
  row.mae = pooled.mae;
  row.rmse = pooled.rmse;

  double qs_acc = 0.0;
  for (double q : kReportQuantiles) {
    double per_q = 0.0;
    for (const Ensemble& e : ensembles) per_q += quantile_score(e, q);
    qs_acc += per_q / static_cast<double>(ensembles.size());
  }
  row.qs = qs_acc / static_cast<double>(kReportQuantiles.size());

  double crps_acc = 0.0, es_acc = 0.0, vs_acc = 0.0;
  for (const Ensemble& e : ensembles) {
    crps_acc += crps_mean(e);
    es_acc += energy_score(e);
    vs_acc += variogram_score(e);
  }
  const auto n = static_cast<double>(ensembles.size());
  row.crps = crps_acc / n;
  row.es = es_acc / n;
  row.vs = vs_acc / n;
  return row;
}

namespace {

void check_same_conditions(
    const std::vector<std::pair<std::string, const std::vector<Ensemble>*>>& models) {
  if (models.empty()) throw ContractError("report: no models");
  const std::vector<Ensemble>& ref = *models.front().second;
  for (const auto& [name, ens] : models) {
    if (ens->size() != ref.size())
      throw ContractError("report: models scored on different condition counts");
    for (std::size_t k = 0; k < ref.size(); ++k)
      if ((*ens)[k].actual != ref[k].actual)
        throw ContractError("report: models scored on different conditions");
  }
}

}  // namespace

MetricReport build_report(
    const std::vector<std::pair<std::string, const std::vector<Ensemble>*>>& models) {
  check_same_conditions(models);
  MetricReport report;
  for (const auto& [name, ens] : models)
    report.rows.push_back(evaluate_model(name, *ens));
  return report;
}

std::string MetricReport::to_csv() const {
  std::string out = "model,mae,rmse,qs,crps,es,vs\n";
  for (const MetricRow& r : rows) {
    out += r.model;
    for (double v : {r.mae, r.rmse, r.qs, r.crps, r.es, r.vs})
      out += "," + io::format_double(v);
    out += "\n";
  }
  return out;
}

std::string MetricReport::to_text() const {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-10s %10s %10s %10s %10s %10s %12s\n",
                "model", "mae", "rmse", "qs", "crps", "es", "vs");
  out += buf;
  for (const MetricRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-10s %10.4f %10.4f %10.4f %10.4f %10.4f %12.4f\n",
                  r.model.c_str(), r.mae, r.rmse, r.qs, r.crps, r.es, r.vs);
    out += buf;
  }
  return out;
}

void write_qs_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, const std::vector<Ensemble>*>>& models) {
  check_same_conditions(models);
  io::CsvWriter w(path);
  w.raw_line("model,q,qs");
  for (const auto& [name, ens] : models)
    for (double q : kReportQuantiles) {
      double acc = 0.0;
      for (const Ensemble& e : *ens) acc += quantile_score(e, q);
      w.row({name, io::format_double(q),
             io::format_double(acc / static_cast<double>(ens->size()))});
    }
}

void write_crps_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, const std::vector<Ensemble>*>>& models) {
  check_same_conditions(models);
  io::CsvWriter w(path);
  w.raw_line("model,slot,crps");
  for (const auto& [name, ens] : models) {
    const std::int64_t T = ens->front().t();
    std::vector<double> acc(static_cast<std::size_t>(T), 0.0);
    for (const Ensemble& e : *ens) {
      const Tensor per = crps_per_time(e);
      for (std::int64_t t = 0; t < T; ++t) acc[static_cast<std::size_t>(t)] += per[t];
    }
    for (std::int64_t t = 0; t < T; ++t)
      w.row({name, std::to_string(t),
             io::format_double(acc[static_cast<std::size_t>(t)] /
                               static_cast<double>(ens->size()))});
  }
}

}  // namespace netdiff::eval
