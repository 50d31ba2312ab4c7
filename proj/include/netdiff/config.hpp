#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace netdiff::pipeline {

// Flat key=value run configuration.  '#' starts a comment; values may be
// quoted.  Unknown keys are rejected so typos fail fast; the full key set
// is listed in kConfigKeys / README.
class Config {
 public:
  static Config from_file(const std::string& path);

  // CLI overrides; validates the key name.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_str(const std::string& key, const std::string& def) const;
  std::string require_str(const std::string& key) const;
  double get_double(const std::string& key, double def) const;
  std::int64_t get_int(const std::string& key, std::int64_t def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t def) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

// Every accepted configuration key with its documentation line.
const std::map<std::string, std::string>& config_key_docs();

}  // namespace netdiff::pipeline
