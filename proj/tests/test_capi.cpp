// Exercises the shared library through the C interface only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "netdiff.h"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("nd_capi_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Session {
  nd_session* s = nd_session_new();
  ~Session() { nd_session_free(s); }
};

}  // namespace

TEST_CASE("sessions report a version and survive null arguments") {
  CHECK(std::strcmp(nd_version(), "") != 0);
  Session ses;
  REQUIRE(ses.s != nullptr);
  CHECK(std::string(nd_last_error(ses.s)).empty());
  CHECK(nd_set_option(nullptr, "variant", "bdm") == ND_ERR_INTERNAL);
  CHECK(nd_set_option(ses.s, nullptr, "bdm") == ND_ERR_INTERNAL);
  CHECK(nd_load_config_file(ses.s, nullptr) == ND_ERR_INTERNAL);
  CHECK(std::string(nd_last_error(ses.s)).find("null") != std::string::npos);
  CHECK(std::string(nd_last_error(nullptr)).empty());
  nd_session_free(nullptr);  // must be a no-op
}

TEST_CASE("option and config errors map to distinct codes") {
  Session ses;
  CHECK(nd_set_option(ses.s, "no_such_key", "1") == ND_ERR_CONFIG);
  CHECK(std::string(nd_last_error(ses.s)).find("no_such_key") != std::string::npos);
  CHECK(nd_set_option(ses.s, "variant", "bdm") == ND_OK);
  CHECK(std::string(nd_last_error(ses.s)).empty());  // success clears it

  CHECK(nd_load_config_file(ses.s, "/definitely/not/here.cfg") == ND_ERR_IO);

  const fs::path dir = fresh_dir("cfg");
  const fs::path cfg = dir / "run.cfg";
  std::ofstream(cfg) << "hidden=12\nheads=2\ns_tok=4\n";
  CHECK(nd_load_config_file(ses.s, cfg.string().c_str()) == ND_OK);

  std::ofstream(cfg) << "hidden=12\nbroken line\n";
  CHECK(nd_load_config_file(ses.s, cfg.string().c_str()) == ND_ERR_PARSE);
  fs::remove_all(dir);
}

TEST_CASE("commands fail cleanly when their inputs are missing") {
  Session ses;
  CHECK(nd_set_option(ses.s, "netload_csv", "/nope/netload.csv") == ND_OK);
  CHECK(nd_set_option(ses.s, "pv_csv", "/nope/pv.csv") == ND_OK);
  CHECK(nd_set_option(ses.s, "weather_csv", "/nope/weather.csv") == ND_OK);
  CHECK(nd_run_train(ses.s) == ND_ERR_IO);
  CHECK(std::strlen(nd_last_error(ses.s)) > 0);
  CHECK(nd_run_evaluate(ses.s) == ND_ERR_IO);
  CHECK(nd_run_basis(ses.s) == ND_ERR_IO);

  Session bare;
  // train without any data configured: the missing key is a config error
  CHECK(nd_run_train(bare.s) == ND_ERR_CONFIG);
}

TEST_CASE("the full pipeline runs through the shared library") {
  const fs::path dir = fresh_dir("full");
  Session ses;
  auto set = [&](const char* k, const std::string& v) {
    REQUIRE(nd_set_option(ses.s, k, v.c_str()) == ND_OK);
  };
  set("out_dir", dir.string());
  set("synth_customers", "2");
  set("synth_days", "8");
  REQUIRE(nd_run_synth_data(ses.s) == ND_OK);
  for (const char* f : {"netload.csv", "pv.csv", "weather.csv"})
    CHECK(fs::exists(dir / f));

  set("netload_csv", (dir / "netload.csv").string());
  set("pv_csv", (dir / "pv.csv").string());
  set("weather_csv", (dir / "weather.csv").string());
  set("out_dir", (dir / "run").string());
  set("hidden", "16");
  set("heads", "2");
  set("s_tok", "4");
  set("diffusion_steps", "6");
  set("train_steps", "20");
  set("batch_size", "8");
  set("log_every", "10");
  set("samples", "3");

  set("variant", "bdm");
  REQUIRE(nd_run_train(ses.s) == ND_OK);
  set("variant", "pdm");
  REQUIRE(nd_run_train(ses.s) == ND_OK);
  CHECK(fs::exists(dir / "run" / "model_bdm.ckpt"));
  CHECK(fs::exists(dir / "run" / "model_pdm_ema.ckpt"));

  REQUIRE(nd_run_evaluate(ses.s) == ND_OK);
  CHECK(fs::exists(dir / "run" / "report.csv"));
  REQUIRE(nd_run_report(ses.s) == ND_OK);
  CHECK(fs::exists(dir / "run" / "report.txt"));

  set("sample_customer", "1");
  set("sample_date", "2018-03-02");
  REQUIRE(nd_run_sample(ses.s) == ND_OK);
  CHECK(fs::exists(dir / "run" / "samples_pdm_1_2018-03-02.csv"));
  fs::remove_all(dir);
}
