#include "soundguard/error.hpp"

namespace soundguard {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kUnsupportedCodec: return "unsupported-codec";
    case ErrorKind::kUnsupportedVersion: return "unsupported-version";
    case ErrorKind::kInsufficientData: return "insufficient-data";
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kDegenerateData: return "degenerate-data";
    case ErrorKind::kTraining: return "training";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace soundguard
