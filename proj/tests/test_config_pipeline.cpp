#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "netdiff/errors.hpp"
#include "netdiff/pipeline.hpp"

using namespace netdiff::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("nd_pipe_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

// Small-but-real run shared by the smoke tests below.
Config tiny_run_config(const fs::path& data_dir, const fs::path& out) {
  Config cfg;
  cfg.set("netload_csv", (data_dir / "netload.csv").string());
  cfg.set("pv_csv", (data_dir / "pv.csv").string());
  cfg.set("weather_csv", (data_dir / "weather.csv").string());
  cfg.set("out_dir", out.string());
  cfg.set("hidden", "16");
  cfg.set("heads", "2");
  cfg.set("s_tok", "4");
  cfg.set("diffusion_steps", "6");
  cfg.set("train_steps", "30");
  cfg.set("batch_size", "8");
  cfg.set("log_every", "15");
  cfg.set("samples", "3");
  return cfg;
}

}  // namespace

TEST_CASE("config files support comments, blanks, and quoting") {
  const fs::path dir = fresh_dir("cfg");
  const fs::path path = dir / "run.cfg";
  {
    std::ofstream out(path);
    out << "# full-line comment\n";
    out << "\n";
    out << "variant = pdm   # trailing comment\n";
    out << "  hidden=24\n";
    out << "out_dir = \"/tmp/with spaces\"\n";
    out << "lr = '1e-3'\n";
    out << "use_ema = off\n";
    out << "seed_train=42\n";
  }
  const Config cfg = Config::from_file(path.string());
  CHECK(cfg.get_str("variant", "") == "pdm");
  CHECK(cfg.get_int("hidden", 0) == 24);
  CHECK(cfg.get_str("out_dir", "") == "/tmp/with spaces");
  CHECK(cfg.get_double("lr", 0) == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(cfg.get_bool("use_ema", true) == false);
  CHECK(cfg.get_seed("seed_train", 0) == 42);
  CHECK(cfg.has("variant"));
  CHECK(!cfg.has("batch_size"));
  CHECK(cfg.get_int("batch_size", 32) == 32);  // default wins when absent
  CHECK(cfg.require_str("variant") == "pdm");
  CHECK_THROWS_AS(cfg.require_str("netload_csv"), netdiff::ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("config errors carry the offending line and key") {
  const fs::path dir = fresh_dir("cfgerr");
  const fs::path bad_key = dir / "bad_key.cfg";
  std::ofstream(bad_key) << "variant=bdm\nhiden=24\n";
  try {
    Config::from_file(bad_key.string());
    FAIL("expected ConfigError");
  } catch (const netdiff::ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":2") != std::string::npos);
    CHECK(msg.find("hiden") != std::string::npos);
  }

  const fs::path bad_line = dir / "bad_line.cfg";
  std::ofstream(bad_line) << "variant=bdm\njust some words\n";
  CHECK_THROWS_AS(Config::from_file(bad_line.string()), netdiff::ParseError);

  CHECK_THROWS_AS(Config::from_file((dir / "missing.cfg").string()),
                  netdiff::IoError);

  Config cfg;
  CHECK_THROWS_AS(cfg.set("nope", "1"), netdiff::ConfigError);
  cfg.set("hidden", "abc");
  CHECK_THROWS_AS(cfg.get_int("hidden", 0), netdiff::ConfigError);
  cfg.set("lr", "fast");
  CHECK_THROWS_AS(cfg.get_double("lr", 0), netdiff::ConfigError);
  cfg.set("use_ema", "maybe");
  CHECK_THROWS_AS(cfg.get_bool("use_ema", true), netdiff::ConfigError);
  cfg.set("seed_train", "-1");
  CHECK_THROWS_AS(cfg.get_seed("seed_train", 0), netdiff::ConfigError);

  // every key is documented
  CHECK(config_key_docs().size() >= 30);
  for (const auto& [key, doc] : config_key_docs()) CHECK(!doc.empty());
  fs::remove_all(dir);
}

TEST_CASE("generated datasets load, split, and encode end to end") {
  const fs::path dir = fresh_dir("synth");
  Config gen;
  gen.set("out_dir", dir.string());
  gen.set("synth_customers", "2");
  gen.set("synth_days", "10");
  run_synth_data(gen);
  for (const char* f : {"netload.csv", "pv.csv", "weather.csv", "components.csv"})
    CHECK(fs::exists(dir / f));

  Config cfg = tiny_run_config(dir, dir / "run");
  const LoadedData ld = load_and_split(cfg);
  CHECK(ld.dataset.profiles.size() == 20);
  CHECK(ld.dataset.customers.size() == 2);
  CHECK(ld.split.train.size() == 12);
  CHECK(ld.split.test.size() == 8);

  const Encoded train = encode_set(ld.dataset, ld.split.train, cfg);
  CHECK(train.rows.x0.rows() == 12);
  CHECK(train.rows.x0.cols() == 96);
  CHECK(train.rows.y.rows() == 12);
  CHECK(train.rows.y.cols() == 79);
  CHECK(train.rows.basis.rows() == 12);
  CHECK(train.rows.basis.cols() == 7 * 96);
  for (std::int64_t i = 0; i < train.rows.x0.size(); ++i) {
    CHECK(train.rows.x0[i] >= -1.0);
    CHECK(train.rows.x0[i] <= 1.0);
  }
  // identity block: exactly one hot per row
  for (std::int64_t i = 0; i < 12; ++i) {
    double s = 0.0;
    for (int j = 0; j < 25; ++j) s += train.rows.y.at(i, j);
    CHECK(s == 1.0);
  }
  CHECK_THROWS_AS(encode_set(ld.dataset, {}, cfg), netdiff::ContractError);
  fs::remove_all(dir);
}

TEST_CASE("train, evaluate, and report produce a full artifact set") {
  const fs::path dir = fresh_dir("e2e");
  Config gen;
  gen.set("out_dir", dir.string());
  gen.set("synth_customers", "2");
  gen.set("synth_days", "10");
  run_synth_data(gen);

  Config cfg = tiny_run_config(dir, dir / "run");
  cfg.set("variant", "bdm");
  run_train(cfg);
  cfg.set("variant", "pdm");
  run_train(cfg);
  for (const char* f : {"model_bdm.ckpt", "model_bdm_ema.ckpt", "loss_bdm.csv",
                        "model_pdm.ckpt", "model_pdm_ema.ckpt", "loss_pdm.csv"})
    CHECK(fs::exists(dir / "run" / f));
  // loss log: header + windows at steps 15 and 30
  const std::string loss_csv = slurp(dir / "run" / "loss_bdm.csv");
  CHECK(count_lines(loss_csv) == 3);
  CHECK(loss_csv.rfind("step,loss\n", 0) == 0);

  // evaluate without a variant key discovers both checkpoints
  Config eval_cfg = tiny_run_config(dir, dir / "run");
  run_evaluate(eval_cfg);
  const std::string report = slurp(dir / "run" / "report.csv");
  CHECK(report.rfind("model,mae,rmse,qs,crps,es,vs\n", 0) == 0);
  CHECK(count_lines(report) == 3);
  CHECK(report.find("bdm") != std::string::npos);
  CHECK(report.find("pdm") != std::string::npos);
  CHECK(fs::exists(dir / "run" / "qs.csv"));
  CHECK(fs::exists(dir / "run" / "crps.csv"));

  run_report(eval_cfg);
  CHECK(fs::exists(dir / "run" / "report.txt"));
  const std::string text = slurp(dir / "run" / "report.txt");
  CHECK(text.find("bdm") != std::string::npos);
  CHECK(text.find("pdm") != std::string::npos);

  // single-condition sampling writes a denormalized trajectory table
  Config sample_cfg = tiny_run_config(dir, dir / "run");
  sample_cfg.set("variant", "bdm");
  sample_cfg.set("sample_customer", "0");
  sample_cfg.set("sample_date", "2018-03-01");
  run_sample(sample_cfg);
  const std::string samples = slurp(dir / "run" / "samples_bdm_0_2018-03-01.csv");
  CHECK(count_lines(samples) == 4);  // header + samples=3
  fs::remove_all(dir);
}

TEST_CASE("training twice from one config reproduces the checkpoint bytes") {
  const fs::path dir = fresh_dir("repro");
  Config gen;
  gen.set("out_dir", dir.string());
  gen.set("synth_customers", "2");
  gen.set("synth_days", "8");
  run_synth_data(gen);

  Config a = tiny_run_config(dir, dir / "a");
  a.set("variant", "pdm");
  a.set("train_steps", "20");
  run_train(a);
  Config b = tiny_run_config(dir, dir / "b");
  b.set("variant", "pdm");
  b.set("train_steps", "20");
  run_train(b);

  CHECK(slurp(dir / "a" / "model_pdm.ckpt") == slurp(dir / "b" / "model_pdm.ckpt"));
  CHECK(slurp(dir / "a" / "model_pdm_ema.ckpt") ==
        slurp(dir / "b" / "model_pdm_ema.ckpt"));
  CHECK(slurp(dir / "a" / "loss_pdm.csv") == slurp(dir / "b" / "loss_pdm.csv"));

  // a different training seed must change the weights
  Config c = tiny_run_config(dir, dir / "c");
  c.set("variant", "pdm");
  c.set("train_steps", "20");
  c.set("seed_train", "2");
  run_train(c);
  CHECK(slurp(dir / "a" / "model_pdm.ckpt") != slurp(dir / "c" / "model_pdm.ckpt"));
  fs::remove_all(dir);
}

TEST_CASE("basis exports one matrix per day with the configured azimuths") {
  const fs::path dir = fresh_dir("basis");
  Config gen;
  gen.set("out_dir", dir.string());
  gen.set("synth_customers", "1");
  gen.set("synth_days", "3");
  run_synth_data(gen);

  Config cfg;
  cfg.set("weather_csv", (dir / "weather.csv").string());
  cfg.set("out_dir", (dir / "basis").string());
  run_basis(cfg);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "basis")) {
    ++files;
    const std::string content = slurp(entry.path());
    CHECK(count_lines(content) == 8);  // header + 7 azimuth rows
    const std::string first = content.substr(0, content.find('\n'));
    CHECK(first.rfind("azimuth,t0,", 0) == 0);
  }
  CHECK(files == 3);
  fs::remove_all(dir);
}

TEST_CASE("evaluate without checkpoints reports a usable error") {
  const fs::path dir = fresh_dir("nockpt");
  Config gen;
  gen.set("out_dir", dir.string());
  gen.set("synth_customers", "1");
  gen.set("synth_days", "5");
  run_synth_data(gen);
  Config cfg = tiny_run_config(dir, dir / "empty");
  CHECK_THROWS_AS(run_evaluate(cfg), netdiff::IoError);
  fs::remove_all(dir);
}
