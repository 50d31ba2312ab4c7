#pragma once

#include <stdexcept>
#include <string>

namespace netdiff {

// Error taxonomy shared by the C++ core, the C API and the CLI exit codes.
enum class ErrorKind {
  parse = 2,     // malformed input file or value
  config = 3,    // invalid or inconsistent configuration
  numeric = 4,   // NaN/Inf or other numeric failure
  io = 5,        // missing, unreadable or unwritable path
  contract = 6,  // API precondition violated by the caller
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& m) : Error(ErrorKind::parse, m) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error(ErrorKind::config, m) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& m) : Error(ErrorKind::numeric, m) {}
};
struct IoError : Error {
  explicit IoError(const std::string& m) : Error(ErrorKind::io, m) {}
};
struct ContractError : Error {
  explicit ContractError(const std::string& m) : Error(ErrorKind::contract, m) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractError(msg);
}

}  // namespace netdiff
