#include "wnn/error.hpp"

#include <fmt/format.h>

namespace wnn {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OddLength: return "OddLength";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::WrongLevels: return "WrongLevels";
    case ErrorCode::ZeroEnergy: return "ZeroEnergy";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::WrongSegmentCount: return "WrongSegmentCount";
    case ErrorCode::ShortSegment: return "ShortSegment";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::EmptyRow: return "EmptyRow";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", to_string(code), message)), code_(code) {}

ParseError::ParseError(std::filesystem::path path, std::size_t line, const std::string& detail)
    : Error(ErrorCode::ParseError, fmt::format("{}:{}: {}", path.string(), line, detail)),
      path_(std::move(path)),
      line_(line) {}

}  // namespace wnn
