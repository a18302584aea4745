#pragma once

#include <stdexcept>
#include <string>

namespace rebal {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or usage (bad flag, unknown key, invalid option value).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a precondition or invariant (single class, NaN, shape mismatch, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Gourmet weighting has no silhouette spread to work with.
class DegenerateWeighting : public DataError {
 public:
  using DataError::DataError;
};

/// MLP training produced a non-finite loss.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(std::size_t epoch, const std::string& what)
      : Error("training diverged at epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace rebal
