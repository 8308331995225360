#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace sclsim {

/// Base of every error the simulator throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric failure inside a module (statistics, attack, sensing).
/// The CLI maps these to exit code 3.
class NumericError : public Error {
 public:
  NumericError(std::string module, const std::string& what)
      : Error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

class InsufficientSamples : public NumericError {
 public:
  explicit InsufficientSamples(const std::string& module)
      : NumericError(module, "insufficient samples") {}
};

class DegenerateVariance : public NumericError {
 public:
  explicit DegenerateVariance(const std::string& module)
      : NumericError(module, "degenerate variance") {}
};

class LengthMismatch : public NumericError {
 public:
  explicit LengthMismatch(const std::string& module)
      : NumericError(module, "length mismatch") {}
};

class AllColumnsDegenerate : public NumericError {
 public:
  AllColumnsDegenerate()
      : NumericError("attack_eval", "all time columns degenerate") {}
};

/// Invalid configuration. Carries the offending key path; exit code 2.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class InvalidThresholds : public ConfigError {
 public:
  InvalidThresholds()
      : ConfigError("controller", "th_low must be < th_high, both finite and >= 0") {}
};

class UnmappedSensor : public Error {
 public:
  explicit UnmappedSensor(std::size_t sensor_id)
      : Error("controller: sensor " + std::to_string(sensor_id) + " has no acc mapping") {}
};

class PlacementError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Malformed trace file. `line` is 1-based; 0 means the whole file.
class TraceFileError : public Error {
 public:
  TraceFileError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyTraceFile : public TraceFileError {
 public:
  EmptyTraceFile() : TraceFileError(0, "EmptyTraceFile: no rows") {}
};

}  // namespace sclsim
