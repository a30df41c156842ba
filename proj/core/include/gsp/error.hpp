#pragma once

#include <stdexcept>
#include <string>

namespace gsp {

enum class ErrorCode {
  DimensionMismatch,
  InvalidInput,
  NotSpd,
  NotSpsd,
  Asymmetric,
  Singular,
  ZeroRhs,
  Breakdown,
  WrongSolver,
  DegenerateC,
  InsufficientHistory,
  MissingHistory,
  RankRepair,
  Parse,
  Unsupported,
  Usage,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace gsp
