#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace jgs {

enum class ErrorCode {
  kInvalidArgument,
  kDegenerateGeometry,
  kGridMismatch,
  kEmptyForeground,
  kUnknownId,
  kDuplicateId,
  kUnknownPieceKind,
  kMalformedJson,
  kSchemaViolation,
  kRleMismatch,
  kPlacementFailed,
  kEmptyRegion,
  kEnumerationCap,
  kNoCandidates,
  kIo,
  kNotFound,
};

/// Stable kebab-case name used in JSON error payloads and CLI diagnostics.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by hypothesis enumeration when the candidate set exceeds the cap.
class EnumerationCapError : public Error {
 public:
  EnumerationCapError(std::size_t candidate_count, std::size_t cap)
      : Error(ErrorCode::kEnumerationCap,
              "candidate count " + std::to_string(candidate_count) +
                  " exceeds enumeration cap " + std::to_string(cap)),
        candidate_count_(candidate_count) {}

  std::size_t candidate_count() const noexcept { return candidate_count_; }

 private:
  std::size_t candidate_count_;
};

}  // namespace jgs
