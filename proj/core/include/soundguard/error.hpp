#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace soundguard {

/// Broad failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
  kFormat,            // malformed file contents or magic bytes
  kUnsupportedCodec,  // valid container, encoding we do not decode
  kUnsupportedVersion,
  kInsufficientData,
  kInvalidInput,
  kConfig,
  kDegenerateData,
  kTraining,  // numerical failure while optimizing
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace soundguard
