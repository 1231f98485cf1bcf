// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dwsl {

enum class ErrorCode {
  InvalidArgument,
  DiscontinuousProfile,
  PoleProximity,
  NoConvergence,
  OddMZero,
  ParityMismatch,
  DegenerateDerivative,
  WindingInconsistency,
  NoGap,
  SupportOverlap,
  ExactEigenmode,
  SingularFactorization,
  FitUnstable,
  CFLViolation,
  NearSpectrum,
  LocalizationViolation,
  UsageError,
  ParseError,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

}  // namespace dwsl
