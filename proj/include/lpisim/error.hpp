#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lpisim {

enum class ErrorCode {
  MalformedRecord,
  EmptyEphemeris,
  NonMonotonicTime,
  IrregularSpacing,
  OutOfRange,
  InsufficientRecords,
  BadAltitude,
  BadLatitude,
  InvalidState,
  NoConvergence,
  DegenerateGeometry,
  InsufficientScan,
  FitDiverged,
  DegenerateVisibility,
  SingularFit,
  InsufficientData,
  BadAxis,
  NonHermitian,
  DimensionMismatch,
  NotNormalized,
  OrthogonalSelection,
  InvalidArgument,
  ConfigInvalid,
  FileUnreadable,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base of every error raised by the library. The code is stable and is what
/// callers (and the CLI exit-code mapping) switch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Error tied to a line of a text input (1-based line number).
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, const std::string& what)
      : Error(code, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace lpisim
