#include "deur/divergence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace deur {

namespace {

constexpr std::array<std::pair<DivergenceKind, std::string_view>, 6> kKindNames{{
    {DivergenceKind::trace, "trace"},
    {DivergenceKind::infidelity, "infidelity"},
    {DivergenceKind::renyi_sandwiched, "renyi_sandwiched"},
    {DivergenceKind::tsallis, "tsallis"},
    {DivergenceKind::relative_entropy, "relative_entropy"},
    {DivergenceKind::hilbert_schmidt, "hilbert_schmidt"},
}};

}  // namespace

std::string_view to_string(DivergenceKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<DivergenceKind> divergence_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

DivergenceSpec DivergenceSpec::make(DivergenceKind kind, std::optional<double> alpha) {
  switch (kind) {
    case DivergenceKind::renyi_sandwiched:
      if (!alpha || !(*alpha >= 0.5 && *alpha < 1.0)) {
        throw Error(ErrorCode::AlphaOutOfRange,
                    "renyi_sandwiched requires 1/2 <= alpha < 1");
      }
      break;
    case DivergenceKind::tsallis:
      if (!alpha || !(*alpha >= 0.0 && *alpha < 1.0)) {
        throw Error(ErrorCode::AlphaOutOfRange, "tsallis requires 0 <= alpha < 1");
      }
      break;
    default:
      if (alpha) {
        throw Error(ErrorCode::AlphaOutOfRange,
                    std::string(to_string(kind)) + " takes no alpha");
      }
  }
  return DivergenceSpec(kind, alpha);
}

double DivergenceSpec::order() const {
  if (!alpha_) {
    throw Error(ErrorCode::AlphaOutOfRange,
                std::string(to_string(kind_)) + " has no order parameter");
  }
  return *alpha_;
}

std::string DivergenceSpec::label() const {
  std::ostringstream os;
  os << to_string(kind_);
  if (alpha_) os << "(" << *alpha_ << ")";
  return os.str();
}

double gauge(const DivergenceSpec& spec, double x, LogBase base) {
  switch (spec.kind()) {
    case DivergenceKind::trace:
    case DivergenceKind::infidelity:
      return x;
    case DivergenceKind::renyi_sandwiched: {
      const double a = spec.order();
      const double f2 = 1.0 - x * x;
      if (f2 <= 0.0) return kInfinity;
      return a / (a - 1.0) * log_in(base, f2);
    }
    case DivergenceKind::tsallis:
      return x * x / (1.0 - spec.order());
    default:
      throw Error(ErrorCode::NotGaugeable,
                  std::string(to_string(spec.kind())) + " is not gaugeable");
  }
}

double gauge_inverse(const DivergenceSpec& spec, ExtendedReal value, LogBase base) {
  if (!(value >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "gauge_inverse needs a nonnegative value");
  }
  double x = 0.0;
  switch (spec.kind()) {
    case DivergenceKind::trace:
    case DivergenceKind::infidelity:
      x = value;
      break;
    case DivergenceKind::renyi_sandwiched: {
      if (std::isinf(value)) return 1.0;
      const double a = spec.order();
      const double ln_base = base == LogBase::two ? std::numbers::ln2 : 1.0;
      x = std::sqrt(std::max(-std::expm1((a - 1.0) * value / a * ln_base), 0.0));
      break;
    }
    case DivergenceKind::tsallis:
      if (std::isinf(value)) return 1.0;
      x = std::sqrt((1.0 - spec.order()) * value);
      break;
    default:
      throw Error(ErrorCode::NotGaugeable,
                  std::string(to_string(spec.kind())) + " is not gaugeable");
  }
  return std::clamp(x, 0.0, 1.0);
}

}  // namespace deur
