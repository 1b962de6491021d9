#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace neurovote {

enum class ErrorCode {
  MissingFile,
  SizeMismatch,
  RowCountMismatch,
  NonFiniteValue,
  InvalidFormat,
  IoFailure,
  AlignmentError,
  ConceptTooRare,
  ComplementTooSmall,
  EmptyTrainSplit,
  Diverged,
  ClassTooSmall,
  SingularSubCovariance,
  SOutOfRange,
  EmptyPool,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the named codes above;
/// the CLI turns it into the `{"error": ..., "message": ...}` stderr payload.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace neurovote
