// Command-line front end.  All work happens behind the C API; this file
// only parses flags and forwards options.
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "netdiff.h"

namespace {

struct SessionDeleter {
  void operator()(nd_session* s) const { nd_session_free(s); }
};
using SessionPtr = std::unique_ptr<nd_session, SessionDeleter>;

struct CommonOpts {
  std::string config_path;
  std::string variant;
  std::string out;
  std::string samples;
  std::string seed_train, seed_sample, seed_split, seed_data;
  std::vector<std::string> sets;  // raw key=value overrides
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "key=value configuration file");
  cmd->add_option("--variant", o.variant, "model variant: bdm | pdm");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--samples", o.samples, "trajectories per condition (M)");
  cmd->add_option("--seed-train", o.seed_train, "training seed");
  cmd->add_option("--seed-sample", o.seed_sample, "sampling seed");
  cmd->add_option("--seed-split", o.seed_split, "train/test split seed");
  cmd->add_option("--seed-data", o.seed_data, "synthetic dataset seed");
  cmd->add_option("--set", o.sets, "extra key=value override (repeatable)");
}

int fail(nd_session* s, int code) {
  std::fprintf(stderr, "error: %s\n", nd_last_error(s));
  return code;
}

int apply_common(nd_session* s, const CommonOpts& o) {
  if (!o.config_path.empty()) {
    if (int rc = nd_load_config_file(s, o.config_path.c_str())) return rc;
  }
  auto set = [&](const char* key, const std::string& v) {
    return v.empty() ? ND_OK : nd_set_option(s, key, v.c_str());
  };
  if (int rc = set("variant", o.variant)) return rc;
  if (int rc = set("out_dir", o.out)) return rc;
  if (int rc = set("samples", o.samples)) return rc;
  if (int rc = set("seed_train", o.seed_train)) return rc;
  if (int rc = set("seed_sample", o.seed_sample)) return rc;
  if (int rc = set("seed_split", o.seed_split)) return rc;
  if (int rc = set("seed_data", o.seed_data)) return rc;
  for (const std::string& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      return ND_ERR_CONFIG;
    }
    if (int rc = nd_set_option(s, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()))
      return rc;
  }
  return ND_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("net-load diffusion toolkit (") + nd_version() + ")"};
  app.require_subcommand(1);

  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(nd_session*);
    CommonOpts opts;
    CLI::App* sub = nullptr;
  };
  std::vector<Cmd> cmds = {
      {"basis", "solar basis profile CSVs from a weather file", &nd_run_basis, {}, nullptr},
      {"synth-data", "generate a synthetic net-load dataset", &nd_run_synth_data, {}, nullptr},
      {"train", "train a denoising model", &nd_run_train, {}, nullptr},
      {"sample", "sample trajectories for one condition", &nd_run_sample, {}, nullptr},
      {"evaluate", "score models on the held-out split", &nd_run_evaluate, {}, nullptr},
      {"report", "render the metric report", &nd_run_report, {}, nullptr},
  };
  for (Cmd& c : cmds) {
    c.sub = app.add_subcommand(c.name, c.help);
    add_common(c.sub, c.opts);
  }

  CLI11_PARSE(app, argc, argv);

  SessionPtr session(nd_session_new());
  if (!session) {
    std::fprintf(stderr, "error: cannot create session\n");
    return ND_ERR_INTERNAL;
  }
  for (const Cmd& c : cmds) {
    if (!c.sub->parsed()) continue;
    if (int rc = apply_common(session.get(), c.opts))
      return fail(session.get(), rc);
    if (int rc = c.run(session.get())) return fail(session.get(), rc);
    return ND_OK;
  }
  return ND_ERR_CONFIG;  // unreachable: a subcommand is required
}
