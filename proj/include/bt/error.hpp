#pragma once

#include <stdexcept>
#include <string>

namespace bt {

/// Coarse failure classes; the CLI maps each to an exit code.
enum class ErrorKind {
  config,     ///< invalid configuration or CLI arguments
  numerical,  ///< singular geometry, solver failure, domain violations
  io,         ///< missing files, malformed input files, write failures
};

/// Library exception. `what()` carries a "[module] message" string.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& module, const std::string& message)
      : std::runtime_error("[" + module + "] " + message), kind_(kind), module_(module) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

inline Error config_error(const std::string& module, const std::string& msg) {
  return {ErrorKind::config, module, msg};
}
inline Error numerical_error(const std::string& module, const std::string& msg) {
  return {ErrorKind::numerical, module, msg};
}
inline Error io_error(const std::string& module, const std::string& msg) {
  return {ErrorKind::io, module, msg};
}

}  // namespace bt
