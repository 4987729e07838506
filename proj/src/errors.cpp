#include "multimapper/errors.hpp"

namespace mm {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidLensAxis: return "InvalidLensAxis";
    case ErrorKind::DegenerateLens: return "DegenerateLens";
    case ErrorKind::LensSizeMismatch: return "LensSizeMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidOverlap: return "InvalidOverlap";
    case ErrorKind::BrickCoverDimension: return "BrickCoverDimension";
    case ErrorKind::UnsupportedScheme: return "UnsupportedScheme";
    case ErrorKind::UnknownBin: return "UnknownBin";
    case ErrorKind::CoverageError: return "CoverageError";
    case ErrorKind::UnknownNode: return "UnknownNode";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::CorruptSession: return "CorruptSession";
  }
  return "Unknown";
}

}  // namespace mm
