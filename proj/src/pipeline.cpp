#include "netdiff/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "netdiff/csv.hpp"
#include "netdiff/errors.hpp"
#include "netdiff/synthetic.hpp"

namespace netdiff::pipeline {

namespace fs = std::filesystem;
using numerics::Tensor;

model::DenoiserConfig denoiser_config_from(const Config& cfg) {
  model::DenoiserConfig dc;
  dc.variant = model::parse_variant(cfg.get_str("variant", "bdm"));
  dc.t = static_cast<int>(cfg.get_int("profile_len", 96));
  dc.h = static_cast<int>(cfg.get_int("hidden", 1000));
  dc.c = static_cast<int>(cfg.get_int("cond_dim", data::kConditionDim));
  dc.l = static_cast<int>(cfg.get_int("azimuth_count", 7));
  dc.heads = static_cast<int>(cfg.get_int("heads", 4));
  dc.s_tok = static_cast<int>(cfg.get_int("s_tok", 10));
  dc.leaky_slope = cfg.get_double("leaky_slope", 0.01);
  dc.k_scale = cfg.get_double("k_scale", 5000.0);
  dc.validate();
  return dc;
}

model::ScheduleConfig schedule_config_from(const Config& cfg) {
  model::ScheduleConfig sc;
  sc.n_steps = static_cast<int>(cfg.get_int("diffusion_steps", 500));
  sc.beta_start = cfg.get_double("beta_start", 1e-6);
  sc.beta_end = cfg.get_double("beta_end", 2e-2);
  return sc;
}

model::TrainConfig train_config_from(const Config& cfg) {
  model::TrainConfig tc;
  tc.steps = static_cast<int>(cfg.get_int("train_steps", 3000));
  tc.batch_size = static_cast<int>(cfg.get_int("batch_size", 32));
  tc.seed = cfg.get_seed("seed_train", 1);
  tc.ema_mu = cfg.get_double("ema_mu", 0.9);
  tc.log_every = static_cast<int>(cfg.get_int("log_every", 100));
  tc.adam.lr = cfg.get_double("lr", 5e-4);
  tc.adam.lr_decay = cfg.get_double("lr_decay", 0.9);
  tc.adam.lr_decay_every = cfg.get_int("lr_decay_every", 1000);
  return tc;
}

model::SampleConfig sample_config_from(const Config& cfg) {
  model::SampleConfig sc;
  sc.m = static_cast<int>(cfg.get_int("samples", 20));
  sc.seed = cfg.get_seed("seed_sample", 1);
  sc.clip_iterates = cfg.get_bool("clip_iterates", true);
  sc.use_ema = cfg.get_bool("use_ema", true);
  return sc;
}

solar::Site site_from(const Config& cfg) {
  solar::Site site;
  site.latitude_deg = cfg.get_double("latitude", site.latitude_deg);
  site.longitude_deg = cfg.get_double("longitude", site.longitude_deg);
  site.utc_offset_h = cfg.get_double("utc_offset", site.utc_offset_h);
  return site;
}

namespace {

double tilt_from(const Config& cfg, const solar::Site& site) {
  return cfg.get_double("tilt", site.latitude_deg);
}

std::string out_dir(const Config& cfg) {
  const std::string dir = cfg.get_str("out_dir", ".");
  fs::create_directories(dir);
  return dir;
}

// Flattened (L*T) basis rows per date, computed once per distinct date.
class BasisCache {
 public:
  BasisCache(const data::Dataset& ds, const solar::Site& site, double tilt,
             const std::vector<double>& azimuths)
      : ds_(ds), site_(site), tilt_(tilt), azimuths_(azimuths) {}

  const std::vector<double>& rows_for(const data::Date& date) {
    auto it = cache_.find(date);
    if (it != cache_.end()) return it->second;
    auto wx = ds_.weather.find(date);
    if (wx == ds_.weather.end())
      throw ParseError("no weather available for " + date.iso());
    const solar::BasisProfiles bp =
        solar::basis_matrix(wx->second, site_, azimuths_, tilt_);
    std::vector<double> flat(static_cast<std::size_t>(bp.matrix.size()));
    std::copy_n(bp.matrix.data(), bp.matrix.size(), flat.begin());
    return cache_.emplace(date, std::move(flat)).first->second;
  }

 private:
  const data::Dataset& ds_;
  solar::Site site_;
  double tilt_;
  std::vector<double> azimuths_;
  std::map<data::Date, std::vector<double>> cache_;
};

std::vector<double> config_azimuths(const Config& cfg) {
  const auto l = cfg.get_int("azimuth_count", 7);
  if (l == 7) return solar::default_azimuth_set();
  if (l < 1) throw ConfigError("azimuth_count must be positive");
  // Evenly spaced east..west, matching the default set's span.
  std::vector<double> az(static_cast<std::size_t>(l));
  for (std::int64_t i = 0; i < l; ++i)
    az[static_cast<std::size_t>(i)] =
        l == 1 ? 180.0 : 90.0 + 180.0 * static_cast<double>(i) / (l - 1);
  return az;
}

}  // namespace

LoadedData load_and_split(const Config& cfg) {
  LoadedData ld;
  ld.dataset = data::load_dataset(cfg.require_str("netload_csv"),
                                  cfg.require_str("pv_csv"),
                                  cfg.require_str("weather_csv"));
  ld.split = data::split_dataset(ld.dataset.profiles,
                                 cfg.get_double("split_ratio", 0.6),
                                 cfg.get_seed("seed_split", 1));
  return ld;
}

Encoded encode_set(const data::Dataset& ds, const std::vector<std::size_t>& rows,
                   const Config& cfg) {
  if (rows.empty()) throw ContractError("encode_set: empty row selection");
  const solar::Site site = site_from(cfg);
  BasisCache basis(ds, site, tilt_from(cfg, site), config_azimuths(cfg));
  const auto T = static_cast<std::int64_t>(data::kSlotsPerDay);
  const auto n = static_cast<std::int64_t>(rows.size());
  const std::int64_t LT =
      static_cast<std::int64_t>(config_azimuths(cfg).size()) * T;

  Encoded enc;
  enc.profile_rows = rows;
  enc.rows.x0 = Tensor({n, T});
  enc.rows.y = Tensor({n, data::kConditionDim});
  enc.rows.basis = Tensor({n, LT});
  for (std::int64_t i = 0; i < n; ++i) {
    const data::NetLoadProfile& p = ds.profiles[rows[static_cast<std::size_t>(i)]];
    const data::CustomerInfo* info = ds.find_customer(p.customer_id);
    if (!info) throw ContractError("profile references unknown customer");
    const std::vector<double> x0 =
        data::normalize(p.net_kw, ds.bounds.at(p.customer_id));
    std::copy_n(x0.data(), T, enc.rows.x0.data() + i * T);
    const Tensor y = data::encode_condition(info->index, info->caps, p.date);
    std::copy_n(y.data(), y.size(), enc.rows.y.data() + i * data::kConditionDim);
    const std::vector<double>& b = basis.rows_for(p.date);
    if (static_cast<std::int64_t>(b.size()) != LT)
      throw ContractError("basis width mismatch");
    std::copy_n(b.data(), LT, enc.rows.basis.data() + i * LT);
  }
  return enc;
}

std::string checkpoint_path(const Config& cfg, model::Variant v, bool ema) {
  const std::string dir = cfg.get_str("checkpoint_dir", cfg.get_str("out_dir", "."));
  fs::create_directories(dir);
  return dir + "/model_" + model::variant_name(v) + (ema ? "_ema" : "") + ".ckpt";
}

std::vector<eval::Ensemble> make_ensembles(const model::DiffusionModel& dm,
                                           const data::Dataset& ds,
                                           const Encoded& test,
                                           const model::SampleConfig& scfg) {
  const model::DenoiserConfig& dc = dm.denoiser().config();
  const std::int64_t n = test.rows.count();
  const std::int64_t T = dc.t;
  // Chunk conditions so the sampler works on well-shaped batches without
  // holding every trajectory at once.
  const std::int64_t chunk =
      std::max<std::int64_t>(1, 192 / std::max(1, scfg.m));

  std::vector<eval::Ensemble> out(static_cast<std::size_t>(n));
  for (std::int64_t c0 = 0; c0 < n; c0 += chunk) {
    const std::int64_t nc = std::min(chunk, n - c0);
    Tensor y({nc, static_cast<std::int64_t>(dc.c)});
    std::copy_n(test.rows.y.data() + c0 * dc.c, nc * dc.c, y.data());
    Tensor b;
    const Tensor* bp = nullptr;
    if (dc.physics()) {
      const std::int64_t LT = static_cast<std::int64_t>(dc.l) * T;
      b = Tensor({nc, LT});
      std::copy_n(test.rows.basis.data() + c0 * LT, nc * LT, b.data());
      bp = &b;
    }
    const Tensor s = dm.sample_batch(y, bp, scfg);  // (nc*m, T) normalized
    for (std::int64_t c = 0; c < nc; ++c) {
      const std::size_t row = test.profile_rows[static_cast<std::size_t>(c0 + c)];
      const data::NetLoadProfile& p = ds.profiles[row];
      const data::Bounds& bounds = ds.bounds.at(p.customer_id);
      eval::Ensemble e;
      e.samples = Tensor({static_cast<std::int64_t>(scfg.m), T});
      for (std::int64_t k = 0; k < scfg.m; ++k) {
        std::vector<double> norm(static_cast<std::size_t>(T));
        std::copy_n(s.data() + (c * scfg.m + k) * T, T, norm.begin());
        const std::vector<double> kw = data::denormalize(norm, bounds);
        std::copy_n(kw.data(), T, e.samples.data() + k * T);
      }
      e.actual = p.net_kw;
      out[static_cast<std::size_t>(c0 + c)] = std::move(e);
    }
  }
  return out;
}

void run_basis(const Config& cfg) {
  const solar::WeatherByDate weather =
      solar::read_weather_csv(cfg.require_str("weather_csv"));
  const solar::Site site = site_from(cfg);
  const double tilt = tilt_from(cfg, site);
  const std::vector<double> az = config_azimuths(cfg);
  const std::string dir = out_dir(cfg);
  for (const auto& [date, wx] : weather) {
    const solar::WeatherSeries grid =
        wx.step_minutes == 60 ? data::interpolate_weather(wx) : wx;
    const solar::BasisProfiles bp = solar::basis_matrix(grid, site, az, tilt);
    io::CsvWriter w(dir + "/basis_" + date.iso() + ".csv");
    std::string header = "azimuth";
    for (int t = 0; t < data::kSlotsPerDay; ++t)
      header += ",t" + std::to_string(t);
    w.raw_line(header);
    for (std::int64_t i = 0; i < bp.matrix.rows(); ++i) {
      std::vector<std::string> fields;
      fields.push_back(io::format_double(bp.azimuths_deg[static_cast<std::size_t>(i)]));
      for (std::int64_t t = 0; t < bp.matrix.cols(); ++t)
        fields.push_back(io::format_double(bp.matrix.at(i, t)));
      w.row(fields);
    }
  }
}

void run_synth_data(const Config& cfg) {
  data::SyntheticDatasetConfig sc;
  sc.n_customers = static_cast<int>(cfg.get_int("synth_customers", 3));
  sc.n_days = static_cast<int>(cfg.get_int("synth_days", 120));
  sc.start_date = data::Date::parse(cfg.get_str("synth_start_date", "2018-03-01"));
  sc.seed = cfg.get_seed("seed_data", 7);
  sc.site = site_from(cfg);
  sc.tilt_deg = tilt_from(cfg, sc.site);
  const data::SyntheticDataset ds = data::generate_synthetic_dataset(sc);

  const std::string dir = out_dir(cfg);
  data::write_netload_csv(dir + "/netload.csv", ds.profiles);
  data::write_pv_csv(dir + "/pv.csv", ds.customers);
  solar::write_weather_csv(dir + "/weather.csv", ds.weather);
  data::write_components_csv(dir + "/components.csv", ds.profiles);
}

void run_train(const Config& cfg) {
  const LoadedData ld = load_and_split(cfg);
  const Encoded train = encode_set(ld.dataset, ld.split.train, cfg);

  model::DenoiserConfig dc = denoiser_config_from(cfg);
  const model::TrainConfig tc = train_config_from(cfg);
  const model::ScheduleConfig sc = schedule_config_from(cfg);
  model::DiffusionModel dm(model::Denoiser(dc, tc.seed),
                           model::NoiseSchedule::build(sc));

  const std::string dir = out_dir(cfg);
  io::CsvWriter loss_log(dir + "/loss_" + model::variant_name(dc.variant) + ".csv");
  loss_log.raw_line("step,loss");
  const model::TrainResult res = dm.train(
      train.rows, tc, [&](int step, double loss) {
        loss_log.row({std::to_string(step), io::format_double(loss)});
        std::fprintf(stderr, "step %d loss %.6f\n", step, loss);
      });

  const std::map<std::string, double> extra = {
      {"n_steps", static_cast<double>(sc.n_steps)},
      {"beta_start", sc.beta_start},
      {"beta_end", sc.beta_end},
      {"first_window_loss", res.first_window_loss},
      {"last_window_loss", res.last_window_loss},
  };
  dm.denoiser().save(checkpoint_path(cfg, dc.variant, false), extra);
  numerics::CheckpointHeader ema_hd;
  ema_hd.module = "denoiser/" + model::variant_name(dc.variant);
  ema_hd.h = dc.h;
  ema_hd.t = dc.t;
  ema_hd.c = dc.c;
  ema_hd.l = dc.l;
  ema_hd.extra = extra;
  ema_hd.extra["heads"] = dc.heads;
  ema_hd.extra["s_tok"] = dc.s_tok;
  ema_hd.extra["leaky_slope"] = dc.leaky_slope;
  ema_hd.extra["k_scale"] = dc.k_scale;
  numerics::save_checkpoint(checkpoint_path(cfg, dc.variant, true), ema_hd,
                            dm.ema());
}

namespace {

// Rebuilds a trained model (live + EMA weights + schedule) from checkpoints.
model::DiffusionModel load_model(const Config& cfg, model::Variant v) {
  model::Denoiser net = model::Denoiser::load(checkpoint_path(cfg, v, false));
  auto [ema_hd, ema_params] =
      numerics::load_checkpoint(checkpoint_path(cfg, v, true));
  if (ema_hd.module != "denoiser/" + model::variant_name(v))
    throw ParseError("EMA checkpoint variant mismatch");

  // Schedule parameters ride along in the checkpoint and win over config
  // defaults, so sampling always matches training.
  model::ScheduleConfig sc = schedule_config_from(cfg);
  auto pick = [&](const char* key, double cur) {
    auto it = ema_hd.extra.find(key);
    return it == ema_hd.extra.end() ? cur : it->second;
  };
  sc.n_steps = static_cast<int>(pick("n_steps", sc.n_steps));
  sc.beta_start = pick("beta_start", sc.beta_start);
  sc.beta_end = pick("beta_end", sc.beta_end);
  return model::DiffusionModel(std::move(net), model::NoiseSchedule::build(sc),
                               std::move(ema_params));
}

}  // namespace

void run_sample(const Config& cfg) {
  const LoadedData ld = load_and_split(cfg);
  const model::Variant v =
      model::parse_variant(cfg.get_str("variant", "bdm"));
  model::DiffusionModel dm = load_model(cfg, v);
  const model::DenoiserConfig& dc = dm.denoiser().config();

  const int customer = static_cast<int>(cfg.get_int("sample_customer", -1));
  if (customer < 0) throw ConfigError("sample requires sample_customer");
  const data::Date date = data::Date::parse(cfg.require_str("sample_date"));
  const data::CustomerInfo* info = ld.dataset.find_customer(customer);
  if (!info) throw ConfigError("unknown customer id in sample_customer");

  bool seen = false;
  for (const auto& p : ld.dataset.profiles)
    if (p.customer_id == customer && !(p.date < date) && !(date < p.date)) seen = true;
  if (!seen)
    std::fprintf(stderr,
                 "warning: condition (%d, %s) not in the dataset; sampling anyway\n",
                 customer, date.iso().c_str());

  const Tensor y = data::encode_condition(info->index, info->caps, date);
  Tensor basis;
  const Tensor* bp = nullptr;
  if (dc.physics()) {
    const solar::Site site = site_from(cfg);
    BasisCache cache(ld.dataset, site, tilt_from(cfg, site), config_azimuths(cfg));
    const std::vector<double>& b = cache.rows_for(date);
    basis = Tensor({static_cast<std::int64_t>(b.size())});
    std::copy(b.begin(), b.end(), basis.data());
    bp = &basis;
  }

  const model::SampleConfig scfg = sample_config_from(cfg);
  const Tensor s = dm.sample(y, bp, scfg);
  const data::Bounds& bounds = ld.dataset.bounds.at(customer);

  const std::string dir = out_dir(cfg);
  io::CsvWriter w(dir + "/samples_" + model::variant_name(v) + "_" +
                  std::to_string(customer) + "_" + date.iso() + ".csv");
  std::string header = "sample";
  for (int t = 0; t < dc.t; ++t) header += ",t" + std::to_string(t);
  w.raw_line(header);
  for (std::int64_t k = 0; k < s.rows(); ++k) {
    std::vector<double> norm(static_cast<std::size_t>(dc.t));
    std::copy_n(s.data() + k * dc.t, dc.t, norm.begin());
    const std::vector<double> kw = data::denormalize(norm, bounds);
    std::vector<std::string> fields;
    fields.push_back(std::to_string(k));
    for (double vkw : kw) fields.push_back(io::format_double(vkw));
    w.row(fields);
  }
}

void run_evaluate(const Config& cfg) {
  const LoadedData ld = load_and_split(cfg);
  const Encoded test = encode_set(ld.dataset, ld.split.test, cfg);
  const model::SampleConfig scfg = sample_config_from(cfg);

  std::vector<model::Variant> variants;
  if (cfg.has("variant")) {
    variants.push_back(model::parse_variant(cfg.require_str("variant")));
  } else {
    for (model::Variant v : {model::Variant::baseline, model::Variant::physics})
      if (fs::exists(checkpoint_path(cfg, v, false))) variants.push_back(v);
    if (variants.empty())
      throw IoError("evaluate: no model checkpoints found");
  }

  std::vector<std::vector<eval::Ensemble>> per_model;
  per_model.reserve(variants.size());
  for (model::Variant v : variants) {
    const model::DiffusionModel dm = load_model(cfg, v);
    per_model.push_back(make_ensembles(dm, ld.dataset, test, scfg));
  }

  std::vector<std::pair<std::string, const std::vector<eval::Ensemble>*>> models;
  for (std::size_t i = 0; i < variants.size(); ++i)
    models.emplace_back(model::variant_name(variants[i]), &per_model[i]);

  const eval::MetricReport report = eval::build_report(models);
  const std::string dir = out_dir(cfg);
  std::ofstream(dir + "/report.csv") << report.to_csv();
  eval::write_qs_csv(dir + "/qs.csv", models);
  eval::write_crps_csv(dir + "/crps.csv", models);
}

void run_report(const Config& cfg) {
  const std::string dir = cfg.get_str("out_dir", ".");
  const std::string path = dir + "/report.csv";
  io::CsvReader reader(path);
  std::vector<std::string> fields;
  if (!reader.next_row(fields) || fields.size() != 7 || fields[0] != "model")
    throw ParseError(path + ": expected header model,mae,rmse,qs,crps,es,vs");
  eval::MetricReport report;
  while (reader.next_row(fields)) {
    if (fields.size() != 7)
      throw ParseError(path + ":" + std::to_string(reader.line_number()) +
                       ": expected 7 fields");
    eval::MetricRow row;
    row.model = fields[0];
    const std::string ctx = path + ":" + std::to_string(reader.line_number());
    row.mae = io::parse_required(fields[1], ctx);
    row.rmse = io::parse_required(fields[2], ctx);
    row.qs = io::parse_required(fields[3], ctx);
    row.crps = io::parse_required(fields[4], ctx);
    row.es = io::parse_required(fields[5], ctx);
    row.vs = io::parse_required(fields[6], ctx);
    report.rows.push_back(row);
  }
  const std::string text = report.to_text();
  std::fputs(text.c_str(), stdout);
  std::ofstream(dir + "/report.txt") << text;
}

}  // namespace netdiff::pipeline
