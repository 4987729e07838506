#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mm {

enum class ErrorKind {
  InvalidLensAxis,
  DegenerateLens,
  LensSizeMismatch,
  ParseError,
  InvalidOverlap,
  BrickCoverDimension,
  UnsupportedScheme,
  UnknownBin,
  CoverageError,
  UnknownNode,
  InvalidArgument,
  Io,
  CorruptSession,
};

std::string_view to_string(ErrorKind kind) noexcept;

// All library failures surface as mm::Error; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mm
