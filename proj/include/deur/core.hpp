#ifndef DEUR_CORE_HPP
#define DEUR_CORE_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace deur {

enum class ErrorCode {
  NotHermitian,
  NotPositive,
  TraceNotOne,
  DimensionTooSmall,
  DimensionMismatch,
  NotOrthonormal,
  NotStochastic,
  NotNormalized,
  AlphaOutOfRange,
  NotGaugeable,
  MissingOverlap,
  InconsistentTriple,
  UnsupportedDim,
  KindMismatch,
  EmptyCounts,
  InvalidArgument,
  ParseError,
};

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::TraceNotOne: return "TraceNotOne";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotOrthonormal: return "NotOrthonormal";
    case ErrorCode::NotStochastic: return "NotStochastic";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::NotGaugeable: return "NotGaugeable";
    case ErrorCode::MissingOverlap: return "MissingOverlap";
    case ErrorCode::InconsistentTriple: return "InconsistentTriple";
    case ErrorCode::UnsupportedDim: return "UnsupportedDim";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::EmptyCounts: return "EmptyCounts";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

// Validation tolerance for every constructed type.
inline constexpr double kValidationTol = 1e-8;
// Probabilities and eigenvalues below this are treated as exact zeros.
inline constexpr double kZeroTol = 1e-15;

/// Extended nonnegative reals: IEEE +inf stands for the unbounded value.
using ExtendedReal = double;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class LogBase { two, e };

inline std::string_view to_string(LogBase base) {
  return base == LogBase::two ? "2" : "e";
}

template <typename Real>
Real log_in(LogBase base, Real x) {
  using std::log;
  using std::log2;
  return base == LogBase::two ? log2(x) : log(x);
}

/// base^x for the configured logarithm base.
template <typename Real>
Real exp_in(LogBase base, Real x) {
  using std::exp;
  using std::exp2;
  return base == LogBase::two ? exp2(x) : exp(x);
}

}  // namespace deur

#endif  // DEUR_CORE_HPP
