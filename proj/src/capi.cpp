#include "netdiff.h"

#include <exception>
#include <functional>
#include <string>

#include "netdiff/config.hpp"
#include "netdiff/errors.hpp"
#include "netdiff/pipeline.hpp"

struct nd_session {
  netdiff::pipeline::Config config;
  std::string last_error;
};

namespace {

int guard(nd_session* s, const std::function<void()>& fn) {
  if (s == nullptr) return ND_ERR_INTERNAL;
  try {
    fn();
    s->last_error.clear();
    return ND_OK;
  } catch (const netdiff::Error& e) {
    s->last_error = e.what();
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    s->last_error = e.what();
    return ND_ERR_INTERNAL;
  } catch (...) {
    s->last_error = "unknown error";
    return ND_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

nd_session* nd_session_new(void) {
  try {
    return new nd_session;
  } catch (...) {
    return nullptr;
  }
}

void nd_session_free(nd_session* s) { delete s; }

int nd_load_config_file(nd_session* s, const char* path) {
  return guard(s, [&] {
    if (path == nullptr) throw netdiff::ContractError("null config path");
    const auto file = netdiff::pipeline::Config::from_file(path);
    for (const auto& [k, v] : file.entries()) s->config.set(k, v);
  });
}

int nd_set_option(nd_session* s, const char* key, const char* value) {
  return guard(s, [&] {
    if (key == nullptr || value == nullptr)
      throw netdiff::ContractError("null option key or value");
    s->config.set(key, value);
  });
}

int nd_run_basis(nd_session* s) {
  return guard(s, [&] { netdiff::pipeline::run_basis(s->config); });
}

int nd_run_synth_data(nd_session* s) {
  return guard(s, [&] { netdiff::pipeline::run_synth_data(s->config); });
}

int nd_run_train(nd_session* s) {
  return guard(s, [&] { netdiff::pipeline::run_train(s->config); });
}

int nd_run_sample(nd_session* s) {
  return guard(s, [&] { netdiff::pipeline::run_sample(s->config); });
}

int nd_run_evaluate(nd_session* s) {
  return guard(s, [&] { netdiff::pipeline::run_evaluate(s->config); });
}

int nd_run_report(nd_session* s) {
  return guard(s, [&] { netdiff::pipeline::run_report(s->config); });
}

const char* nd_last_error(const nd_session* s) {
  return s == nullptr ? "" : s->last_error.c_str();
}

const char* nd_version(void) { return "0.1.0"; }

}  // extern "C"
