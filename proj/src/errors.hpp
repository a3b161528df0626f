#pragma once

#include <stdexcept>
#include <string>

namespace nullfol {

enum class ErrorCode {
  DomainError = 1,
  NoConvergence,
  ProfileError,
  GridMismatch,
  NotMeanZero,
  UnsupportedOrder,
  OutOfDomain,
  StepRejected,
  LockstepViolation,
  OffGridEvalFailure,
  NonDiffeo,
  HypothesisViolated,
  EnsembleIncomplete,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ProfileError: return "ProfileError";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NotMeanZero: return "NotMeanZero";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::StepRejected: return "StepRejected";
    case ErrorCode::LockstepViolation: return "LockstepViolation";
    case ErrorCode::OffGridEvalFailure: return "OffGridEvalFailure";
    case ErrorCode::NonDiffeo: return "NonDiffeo";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::EnsembleIncomplete: return "EnsembleIncomplete";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace nullfol
