#pragma once

#include <stdexcept>
#include <string>

namespace qerd {

enum class ErrorKind {
  InvalidContext,
  InvalidArgument,
  DivergentSeries,
  NearPoleDenominator,
  TruncationInsufficient,
  BranchCut,
  WindowTooSmall,
  DivergentParameters,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidContext: return "InvalidContext";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DivergentSeries: return "DivergentSeries";
    case ErrorKind::NearPoleDenominator: return "NearPoleDenominator";
    case ErrorKind::TruncationInsufficient: return "TruncationInsufficient";
    case ErrorKind::BranchCut: return "BranchCut";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::DivergentParameters: return "DivergentParameters";
  }
  return "Unknown";
}

}  // namespace qerd
