#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trimask {

enum class ErrorCode {
  kDegenerateTriangle,
  kOutOfBounds,
  kNotBinary,
  kMalformedImage,
  kDimensionMismatch,
  kNoImagesFound,
  kOutputNotWritable,
  kWrongState,
  kNothingToUndo,
  kNotADirectory,
  kNotFound,
  kUnpaired,
  kPathOutsideRoot,
  kInvalidArgument,
  kIo,
};

/// Stable snake_case name, used in CLI diagnostics and HTTP error bodies.
inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateTriangle: return "degenerate";
    case ErrorCode::kOutOfBounds: return "out_of_bounds";
    case ErrorCode::kNotBinary: return "not_binary";
    case ErrorCode::kMalformedImage: return "malformed_image";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kNoImagesFound: return "no_images_found";
    case ErrorCode::kOutputNotWritable: return "output_not_writable";
    case ErrorCode::kWrongState: return "wrong_state";
    case ErrorCode::kNothingToUndo: return "nothing_to_undo";
    case ErrorCode::kNotADirectory: return "not_a_directory";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kUnpaired: return "unpaired";
    case ErrorCode::kPathOutsideRoot: return "path_outside_root";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace trimask
