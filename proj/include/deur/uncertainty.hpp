#ifndef DEUR_UNCERTAINTY_HPP
#define DEUR_UNCERTAINTY_HPP

// Schur-concave uncertainty measures of a single outcome distribution.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "deur/qstate.hpp"

namespace deur {

enum class UncertaintyKind { delta, renyi, shannon, half_norm };

inline std::string_view to_string(UncertaintyKind kind);

class UncertaintySpec {
 public:
  static UncertaintySpec delta() { return UncertaintySpec(UncertaintyKind::delta, {}); }
  static UncertaintySpec shannon() { return UncertaintySpec(UncertaintyKind::shannon, {}); }
  static UncertaintySpec half_norm() {
    return UncertaintySpec(UncertaintyKind::half_norm, {});
  }
  /// Rényi entropy of order alpha >= 0, alpha != 1 (order 0 is the Hartley
  /// entropy).
  static UncertaintySpec renyi(double alpha) {
    if (!(alpha >= 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
      throw Error(ErrorCode::AlphaOutOfRange, "Renyi entropy order must be >= 0 and != 1");
    }
    return UncertaintySpec(UncertaintyKind::renyi, alpha);
  }

  UncertaintyKind kind() const { return kind_; }
  std::optional<double> alpha() const { return alpha_; }

 private:
  UncertaintySpec(UncertaintyKind kind, std::optional<double> alpha)
      : kind_(kind), alpha_(alpha) {}

  UncertaintyKind kind_;
  std::optional<double> alpha_;
};

/// sqrt(1 - Σ p_i²).
template <typename Real>
Real delta_uncertainty(const ProbDist<Real>& p) {
  using std::sqrt;
  return sqrt(std::max(Real(1) - p.probs().squaredNorm(), Real(0)));
}

template <typename Real>
Real shannon_entropy(const ProbDist<Real>& p, LogBase base = LogBase::two) {
  return entropy_of<Real>(p.probs(), base);
}

/// H_α(p) = log(Σ p^α) / (1 - α); order 1 falls back to Shannon.
template <typename Real>
Real renyi_entropy(const ProbDist<Real>& p, Real alpha, LogBase base = LogBase::two) {
  if (alpha == Real(1)) return shannon_entropy(p, base);
  Real s(0);
  for (Eigen::Index i = 0; i < p.dim(); ++i) {
    using std::pow;
    if (p[i] > Real(kZeroTol)) s += pow(p[i], alpha);
  }
  return std::max(log_in(base, s) / (Real(1) - alpha), Real(0));
}

/// ½(‖p‖_{1/2} - 1) with ‖p‖_{1/2} = (Σ sqrt p_i)².
template <typename Real>
Real half_norm_uncertainty(const ProbDist<Real>& p) {
  const Real s = p.probs().cwiseSqrt().sum();
  return std::max(Real(0.5) * (s * s - Real(1)), Real(0));
}

template <typename Real>
Real umeasure(const UncertaintySpec& spec, const ProbDist<Real>& p,
              LogBase base = LogBase::two) {
  switch (spec.kind()) {
    case UncertaintyKind::delta: return delta_uncertainty(p);
    case UncertaintyKind::renyi:
      return renyi_entropy(p, static_cast<Real>(*spec.alpha()), base);
    case UncertaintyKind::shannon: return shannon_entropy(p, base);
    case UncertaintyKind::half_norm: return half_norm_uncertainty(p);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown uncertainty kind");
}

/// True iff p1 majorizes p2: descending partial sums of p1 dominate those of
/// p2 within 1e-10.
template <typename Real>
bool majorizes(const ProbDist<Real>& p1, const ProbDist<Real>& p2) {
  detail::require_same_dim(p1.dim(), p2.dim(), "majorizes");
  std::vector<Real> a(p1.probs().begin(), p1.probs().end());
  std::vector<Real> b(p2.probs().begin(), p2.probs().end());
  std::sort(a.begin(), a.end(), std::greater<>());
  std::sort(b.begin(), b.end(), std::greater<>());
  Real sa(0);
  Real sb(0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    sa += a[k];
    sb += b[k];
    if (sa < sb - Real(1e-10)) return false;
  }
  return true;
}

inline std::string_view to_string(UncertaintyKind kind) {
  switch (kind) {
    case UncertaintyKind::delta: return "delta";
    case UncertaintyKind::renyi: return "renyi";
    case UncertaintyKind::shannon: return "shannon";
    case UncertaintyKind::half_norm: return "half_norm";
  }
  return "unknown";
}

}  // namespace deur

#endif  // DEUR_UNCERTAINTY_HPP
