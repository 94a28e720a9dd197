#include "aaseq/error.hpp"

namespace aaseq {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::IllegalResidue: return "IllegalResidue";
    case ErrorKind::HeaderWithoutSequence: return "HeaderWithoutSequence";
    case ErrorKind::NoLabeledRecords: return "NoLabeledRecords";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::Io: return "Io";
    case ErrorKind::SequenceTooShort: return "SequenceTooShort";
    case ErrorKind::InvalidM: return "InvalidM";
    case ErrorKind::InvalidR: return "InvalidR";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateSum: return "DegenerateSum";
    case ErrorKind::NonFiniteWeights: return "NonFiniteWeights";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) {
  return kind == ErrorKind::NonFiniteWeights || kind == ErrorKind::DegenerateSum;
}

Error::Error(ErrorKind kind, std::string op, const std::string& detail)
    : std::runtime_error(op + ": " + std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      op_(std::move(op)) {}

}  // namespace aaseq
