#pragma once

#include <stdexcept>
#include <string>

namespace stylos {

// Error categories map 1:1 onto the CLI exit codes.
enum class ErrorKind { config = 2, data = 3, backend = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Bad configuration, missing paths, schema/head mismatches.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(ErrorKind::config, msg) {}
};

// Input data violates a precondition (deficits, empty corpora, missing artifacts).
class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(ErrorKind::data, msg) {}
};

// Model runtime failures (unloadable checkpoints, external tool errors).
class BackendError : public Error {
 public:
  explicit BackendError(const std::string& msg) : Error(ErrorKind::backend, msg) {}
};

}  // namespace stylos
