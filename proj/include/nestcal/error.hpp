#pragma once

#include <stdexcept>
#include <string>

namespace nestcal {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  EmptyInput,
  ZeroElement,
  ZeroDenominator,
  ModeMismatch,
  RankDeficient,
  SingularWeights,
  SubarrayTooLarge,
  TooManySources,
  PeaksNotFound,
  CountMismatch,
  ConfigInvalid,
  AllTrialsFailed,
  Io,
};

const char* to_string(ErrorKind kind);

/// Library error. Every failure path in nestcal throws this type so callers
/// can branch on kind() instead of parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Carries the offending covariance entry (0-based) for ZeroElement and
/// ZeroDenominator failures.
class EntryError : public Error {
 public:
  EntryError(ErrorKind kind, int row, int col, const std::string& what)
      : Error(kind, what + " at (" + std::to_string(row) + ", " + std::to_string(col) + ")"),
        row_(row),
        col_(col) {}

  int row() const noexcept { return row_; }
  int col() const noexcept { return col_; }

 private:
  int row_;
  int col_;
};

}  // namespace nestcal
