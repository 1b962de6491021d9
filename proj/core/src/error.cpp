#include "neurovote/error.hpp"

namespace neurovote {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::RowCountMismatch: return "RowCountMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InvalidFormat: return "InvalidFormat";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::AlignmentError: return "AlignmentError";
    case ErrorCode::ConceptTooRare: return "ConceptTooRare";
    case ErrorCode::ComplementTooSmall: return "ComplementTooSmall";
    case ErrorCode::EmptyTrainSplit: return "EmptyTrainSplit";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::SingularSubCovariance: return "SingularSubCovariance";
    case ErrorCode::SOutOfRange: return "SOutOfRange";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace neurovote
