#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wnn {

enum class ErrorCode {
  InvalidArgument,
  OddLength,
  TooShort,
  ShapeMismatch,
  WrongLevels,
  ZeroEnergy,
  SingularSystem,
  MissingFile,
  ParseError,
  WrongSegmentCount,
  ShortSegment,
  CountMismatch,
  EmptyRow,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Malformed text input. Line numbers are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::filesystem::path path, std::size_t line, const std::string& detail);

  const std::filesystem::path& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::filesystem::path path_;
  std::size_t line_;
};

}  // namespace wnn
