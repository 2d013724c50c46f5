#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace multinorm {

enum class ErrorCode {
  NonCyclic,
  BadDegree,
  ZeroInput,
  ModulusTooLarge,
  AmbientTooLarge,
  MalformedProfile,
  NotCoherent,
  WrongExponent,
  NoCyclicFactor,
  NotLocallySolvable,
  NotPrimeDegree,
  WrongShape,
  UnsupportedDegree,
  Mismatch,
  Internal,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonCyclic: return "NonCyclic";
    case ErrorCode::BadDegree: return "BadDegree";
    case ErrorCode::ZeroInput: return "ZeroInput";
    case ErrorCode::ModulusTooLarge: return "ModulusTooLarge";
    case ErrorCode::AmbientTooLarge: return "AmbientTooLarge";
    case ErrorCode::MalformedProfile: return "MalformedProfile";
    case ErrorCode::NotCoherent: return "NotCoherent";
    case ErrorCode::WrongExponent: return "WrongExponent";
    case ErrorCode::NoCyclicFactor: return "NoCyclicFactor";
    case ErrorCode::NotLocallySolvable: return "NotLocallySolvable";
    case ErrorCode::NotPrimeDegree: return "NotPrimeDegree";
    case ErrorCode::WrongShape: return "WrongShape";
    case ErrorCode::UnsupportedDegree: return "UnsupportedDegree";
    case ErrorCode::Mismatch: return "Mismatch";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

// Guard rails for user-supplied inputs.  Computations refuse to start when a
// modulus or an ambient group would exceed these, rather than hanging.
struct Limits {
  std::int64_t modulus_limit = 1000000;     // per-field conductor bound
  std::int64_t ambient_limit = 10000000;    // |ambient group| bound
  std::int64_t class_limit = 1000000;       // number of distinct place classes
};

}  // namespace multinorm
