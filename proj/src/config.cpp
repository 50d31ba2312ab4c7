#include "netdiff/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>

#include "netdiff/errors.hpp"

namespace netdiff::pipeline {

const std::map<std::string, std::string>& config_key_docs() {
  static const std::map<std::string, std::string> docs = {
      {"netload_csv", "net-load profiles (customer_id,date,t0..t95)"},
      {"pv_csv", "PV metadata (customer_id,cap_total,cap_west,cap_south,cap_east)"},
      {"weather_csv", "weather series (timestamp,temp_c,wind_ms,dni,dhi,ghi)"},
      {"out_dir", "directory for generated artifacts (default .)"},
      {"checkpoint_dir", "directory for model checkpoints (default out_dir)"},
      {"variant", "model variant: bdm | pdm (default bdm)"},
      {"hidden", "denoiser hidden width H (default 1000)"},
      {"profile_len", "timesteps per day T (default 96)"},
      {"cond_dim", "condition vector width C (default 79)"},
      {"heads", "attention heads (default 4)"},
      {"s_tok", "attention token count (default 10)"},
      {"k_scale", "noise-level scale in the sinusoidal embedding (default 5000)"},
      {"leaky_slope", "leaky-rectifier slope (default 0.01)"},
      {"diffusion_steps", "schedule length N (default 500)"},
      {"beta_start", "first forward variance (default 1e-6)"},
      {"beta_end", "last forward variance (default 2e-2)"},
      {"train_steps", "optimizer steps (default 3000)"},
      {"batch_size", "training batch size (default 32)"},
      {"lr", "initial learning rate (default 5e-4)"},
      {"lr_decay", "learning-rate decay factor (default 0.9)"},
      {"lr_decay_every", "steps between decays (default 1000)"},
      {"ema_mu", "EMA smoothing factor (default 0.9)"},
      {"log_every", "loss-log window in steps (default 100)"},
      {"split_ratio", "train fraction per customer (default 0.6)"},
      {"samples", "trajectories per condition M (default 20)"},
      {"clip_iterates", "clamp reverse steps to [-1,1] (default true)"},
      {"use_ema", "sample with EMA weights (default true)"},
      {"seed_train", "training-loop seed (default 1)"},
      {"seed_sample", "sampling seed (default 1)"},
      {"seed_split", "train/test split seed (default 1)"},
      {"seed_data", "synthetic dataset seed (default 7)"},
      {"sample_customer", "customer id for the sample command"},
      {"sample_date", "date (YYYY-MM-DD) for the sample command"},
      {"synth_customers", "synthetic dataset: customer count (default 3)"},
      {"synth_days", "synthetic dataset: day count (default 120)"},
      {"synth_start_date", "synthetic dataset: first day (default 2018-03-01)"},
      {"latitude", "site latitude, degrees (default 30.2672)"},
      {"longitude", "site longitude, degrees east (default -97.74)"},
      {"utc_offset", "site UTC offset, hours (default -6)"},
      {"tilt", "panel tilt for basis profiles (default latitude)"},
      {"azimuth_count", "basis azimuth count L (default 7)"},
  };
  return docs;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  Config cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!config_key_docs().count(key))
    throw ConfigError("unknown configuration key '" + key + "'");
  kv_[key] = value;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_str(const std::string& key, const std::string& def) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? def : it->second;
}

std::string Config::require_str(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end())
    throw ConfigError("missing required configuration key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key, double def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  const std::string& s = it->second;
  double v = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || p != end)
    throw ConfigError("key '" + key + "': not a number: '" + s + "'");
  return v;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  const std::string& s = it->second;
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ConfigError("key '" + key + "': not an integer: '" + s + "'");
  return v;
}

bool Config::get_bool(const std::string& key, bool def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  const std::string& s = it->second;
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("key '" + key + "': not a boolean: '" + s + "'");
}

std::uint64_t Config::get_seed(const std::string& key, std::uint64_t def) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  const std::string& s = it->second;
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ConfigError("key '" + key + "': not a seed: '" + s + "'");
  return v;
}

}  // namespace netdiff::pipeline
