#include "jgs/error.hpp"

namespace jgs {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDegenerateGeometry: return "degenerate-geometry";
    case ErrorCode::kGridMismatch: return "grid-mismatch";
    case ErrorCode::kEmptyForeground: return "empty-foreground";
    case ErrorCode::kUnknownId: return "unknown-id";
    case ErrorCode::kDuplicateId: return "duplicate-id";
    case ErrorCode::kUnknownPieceKind: return "unknown-piece-kind";
    case ErrorCode::kMalformedJson: return "malformed-json";
    case ErrorCode::kSchemaViolation: return "schema-violation";
    case ErrorCode::kRleMismatch: return "rle-mismatch";
    case ErrorCode::kPlacementFailed: return "placement-failed";
    case ErrorCode::kEmptyRegion: return "empty-region";
    case ErrorCode::kEnumerationCap: return "enumeration-cap";
    case ErrorCode::kNoCandidates: return "no-candidates";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kNotFound: return "not-found";
  }
  return "unknown";
}

}  // namespace jgs
