// SPDX-License-Identifier: Apache-2.0
#include "dwsl/error.hpp"

namespace dwsl {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DiscontinuousProfile: return "DiscontinuousProfile";
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::OddMZero: return "OddMZero";
    case ErrorCode::ParityMismatch: return "ParityMismatch";
    case ErrorCode::DegenerateDerivative: return "DegenerateDerivative";
    case ErrorCode::WindingInconsistency: return "WindingInconsistency";
    case ErrorCode::NoGap: return "NoGap";
    case ErrorCode::SupportOverlap: return "SupportOverlap";
    case ErrorCode::ExactEigenmode: return "ExactEigenmode";
    case ErrorCode::SingularFactorization: return "SingularFactorization";
    case ErrorCode::FitUnstable: return "FitUnstable";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::NearSpectrum: return "NearSpectrum";
    case ErrorCode::LocalizationViolation: return "LocalizationViolation";
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

void raise(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(error_name(code)) + ": " + what);
}

}  // namespace dwsl
