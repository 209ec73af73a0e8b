#pragma once

#include <stdexcept>
#include <string>

namespace augsel {

inline constexpr const char* kVersion = "0.1.0";

// Broad failure classes. Numeric kinds (convergence, conditioning) map to a
// different process exit code than input/usage kinds.
enum class ErrorKind {
  invalid_argument,
  io,
  format,
  parse,
  label,
  size,
  index,
  data,
  metric,
  config,
  convergence,
  conditioning,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline bool is_numeric_error(ErrorKind k) {
  return k == ErrorKind::convergence || k == ErrorKind::conditioning;
}

[[noreturn]] inline void raise(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (!cond) raise(kind, msg);
}

}  // namespace augsel
