#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aaseq {

enum class ErrorKind {
  // seq_io
  EmptyInput,
  IllegalResidue,
  HeaderWithoutSequence,
  NoLabeledRecords,
  DuplicateId,
  UnknownLabel,
  InvalidParameter,
  Io,
  // embed
  SequenceTooShort,
  InvalidM,
  InvalidR,
  DimensionMismatch,
  // trainer
  DegenerateSum,
  NonFiniteWeights,
};

std::string_view to_string(ErrorKind kind);

/// Numerical failures map to CLI exit code 3, everything else to 2.
bool is_numerical(ErrorKind kind);

/// Error raised by every library operation. `op()` names the operation that
/// failed so front ends can report where things went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string op, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& op() const noexcept { return op_; }

 private:
  ErrorKind kind_;
  std::string op_;
};

}  // namespace aaseq
