#pragma once

#include <stdexcept>
#include <string>

namespace fimform {

enum class ErrorKind {
  InvalidArgument,
  DegenerateGeometry,
  Numeric,
  Config,
};

/// Base exception for everything the library throws. The kind decides the
/// C API error code and the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DegenerateGeometry : public Error {
 public:
  explicit DegenerateGeometry(const std::string& what)
      : Error(ErrorKind::DegenerateGeometry, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(ErrorKind::InvalidArgument, what);
}

}  // namespace fimform
