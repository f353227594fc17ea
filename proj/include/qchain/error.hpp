#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qchain {

enum class ErrorCode {
  InvalidArgument,
  NonHermitianInput,
  DimensionMismatch,
  AlphabetMismatch,
  NearOneOrder,
  SupportViolation,
  NonCommutingInputs,
  DimensionTooLarge,
  NonUnitalCandidate,
  OrderOutOfRange,
  InvalidState,
  MalformedInput,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. Every recoverable failure carries a machine-readable code
/// so the CLI can report it as JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qchain
