#ifndef DEUR_DIVERGENCE_HPP
#define DEUR_DIVERGENCE_HPP

// Quantum and classical distinguishability measures and the gauge maps
// that rescale them to agree with the infidelity on pure states.

#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "deur/qstate.hpp"

namespace deur {

enum class DivergenceKind {
  trace,
  infidelity,
  renyi_sandwiched,
  tsallis,
  relative_entropy,
  hilbert_schmidt,
};

std::string_view to_string(DivergenceKind kind);
std::optional<DivergenceKind> divergence_kind_from_string(std::string_view name);

/// A divergence together with its order parameter, if any. Rényi requires
/// 1/2 <= alpha < 1, Tsallis 0 <= alpha < 1; the other kinds take none.
class DivergenceSpec {
 public:
  static DivergenceSpec make(DivergenceKind kind, std::optional<double> alpha = {});

  static DivergenceSpec trace() { return make(DivergenceKind::trace); }
  static DivergenceSpec infidelity() { return make(DivergenceKind::infidelity); }
  static DivergenceSpec renyi(double alpha) {
    return make(DivergenceKind::renyi_sandwiched, alpha);
  }
  static DivergenceSpec tsallis(double alpha) { return make(DivergenceKind::tsallis, alpha); }
  static DivergenceSpec relative_entropy() { return make(DivergenceKind::relative_entropy); }
  static DivergenceSpec hilbert_schmidt() { return make(DivergenceKind::hilbert_schmidt); }

  DivergenceKind kind() const { return kind_; }
  std::optional<double> alpha() const { return alpha_; }
  /// Alpha of a parametric kind; throws for the others.
  double order() const;

  bool gaugeable() const {
    return kind_ == DivergenceKind::trace || kind_ == DivergenceKind::infidelity ||
           kind_ == DivergenceKind::renyi_sandwiched || kind_ == DivergenceKind::tsallis;
  }

  std::string label() const;

  friend bool operator==(const DivergenceSpec&, const DivergenceSpec&) = default;

 private:
  DivergenceSpec(DivergenceKind kind, std::optional<double> alpha)
      : kind_(kind), alpha_(alpha) {}

  DivergenceKind kind_;
  std::optional<double> alpha_;
};

namespace detail {

// Mass of one state on the null space of another above this counts as a
// support violation.
inline constexpr double kSupportTol = 1e-12;

/// W_jk = |<u_j|v_k>|² between two eigenbases.
template <typename Real>
RMatrix<Real> eigen_overlaps(const DensityMatrix<Real>& a, const DensityMatrix<Real>& b) {
  return (a.eigenvectors().adjoint() * b.eigenvectors()).cwiseAbs2();
}

/// x^t with 0^t := 0 for every t (support convention).
template <typename Real>
Real support_pow(Real x, Real t) {
  using std::pow;
  return x > Real(kZeroTol) ? pow(x, t) : Real(0);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Classical divergences on probability vectors.

template <typename Real>
Real kolmogorov_distance(const ProbDist<Real>& q, const ProbDist<Real>& qp) {
  detail::require_same_dim(q.dim(), qp.dim(), "kolmogorov_distance");
  return Real(0.5) * (q.probs() - qp.probs()).cwiseAbs().sum();
}

/// Σ sqrt(q_i q'_i).
template <typename Real>
Real bhattacharyya(const ProbDist<Real>& q, const ProbDist<Real>& qp) {
  detail::require_same_dim(q.dim(), qp.dim(), "bhattacharyya");
  return std::min(q.probs().cwiseProduct(qp.probs()).cwiseSqrt().sum(), Real(1));
}

/// 1 - Σ sqrt(q_i q'_i) as ½ Σ (sqrt(q_i) - sqrt(q'_i))², which is exactly 0
/// for equal inputs instead of a rounding residue.
template <typename Real>
Real bhattacharyya_deficit(const ProbDist<Real>& q, const ProbDist<Real>& qp) {
  detail::require_same_dim(q.dim(), qp.dim(), "bhattacharyya_deficit");
  return std::clamp(Real(0.5) * (q.probs().cwiseSqrt() - qp.probs().cwiseSqrt()).squaredNorm(),
                    Real(0), Real(1));
}

/// sqrt(1 - (Σ sqrt(q q'))²), the classical infidelity.
template <typename Real>
Real classical_infidelity(const ProbDist<Real>& q, const ProbDist<Real>& qp) {
  using std::sqrt;
  const Real d = bhattacharyya_deficit(q, qp);
  return sqrt(std::max(d * (Real(2) - d), Real(0)));
}

/// Σ q_i^α q'_i^(1-α) for α in (0, 1), with 0-probability terms dropped.
/// For α > 1 a term with q_i > 0 = q'_i is +inf. α = 0 gives Σ_{q_i>0} q'_i.
template <typename Real>
Real renyi_overlap(const ProbDist<Real>& q, const ProbDist<Real>& qp, Real alpha) {
  detail::require_same_dim(q.dim(), qp.dim(), "renyi_overlap");
  Real s(0);
  for (Eigen::Index i = 0; i < q.dim(); ++i) {
    const Real a = q[i];
    const Real b = qp[i];
    if (a <= Real(kZeroTol)) continue;
    if (b <= Real(kZeroTol)) {
      if (alpha > Real(1)) return Real(kInfinity);
      continue;
    }
    using std::pow;
    s += pow(a, alpha) * pow(b, Real(1) - alpha);
  }
  return s;
}

/// 1 - renyi_overlap(q, q', α) for 0 <= α < 1. Using Σ q = Σ q' = 1 it is
/// summed as Σ [α q_i + (1-α) q'_i - q_i^α q'_i^(1-α)], whose terms are
/// nonnegative (weighted AM-GM) and second order in q - q', so near-equal
/// inputs do not leave a first-order rounding residue.
template <typename Real>
Real renyi_overlap_deficit(const ProbDist<Real>& q, const ProbDist<Real>& qp, Real alpha) {
  detail::require_same_dim(q.dim(), qp.dim(), "renyi_overlap_deficit");
  Real s(0);
  for (Eigen::Index i = 0; i < q.dim(); ++i) {
    const Real a = q[i];
    const Real b = qp[i];
    if (a <= Real(kZeroTol) || b <= Real(kZeroTol)) {
      // The overlap term is dropped, so the whole weighted mean remains.
      s += alpha * a + (Real(1) - alpha) * b;
      continue;
    }
    using std::expm1;
    using std::log;
    const Real t = log(b / a);
    s += a * std::max((Real(1) - alpha) * expm1(t) - expm1((Real(1) - alpha) * t), Real(0));
  }
  return std::clamp(s, Real(0), Real(1));
}

/// (1/(α-1)) log Σ q^α q'^(1-α) for any α > 0, α != 1. A vanishing sum
/// (α < 1) or a support violation (α > 1) gives +inf.
template <typename Real>
Real classical_renyi_divergence(const ProbDist<Real>& q, const ProbDist<Real>& qp,
                                Real alpha, LogBase base = LogBase::two) {
  if (!(alpha >= Real(0)) || alpha == Real(1)) {
    throw Error(ErrorCode::AlphaOutOfRange, "classical Renyi order must be >= 0, != 1");
  }
  if (alpha < Real(1)) {
    const Real deficit = renyi_overlap_deficit(q, qp, alpha);
    if (deficit >= Real(1)) return Real(kInfinity);
    using std::log1p;
    const Real ln_s = log1p(-deficit);
    return std::max(ln_s * log_in(base, std::numbers::e_v<Real>) / (alpha - Real(1)), Real(0));
  }
  const Real s = renyi_overlap(q, qp, alpha);
  if (s == Real(kInfinity)) return Real(kInfinity);
  if (s <= Real(0)) return Real(kInfinity);
  return std::max(log_in(base, s) / (alpha - Real(1)), Real(0));
}

/// Σ q log(q/q'), +inf if q_i > 0 = q'_i.
template <typename Real>
Real kl_divergence(const ProbDist<Real>& q, const ProbDist<Real>& qp,
                   LogBase base = LogBase::two) {
  detail::require_same_dim(q.dim(), qp.dim(), "kl_divergence");
  Real s(0);
  for (Eigen::Index i = 0; i < q.dim(); ++i) {
    if (q[i] <= Real(kZeroTol)) continue;
    if (qp[i] <= Real(kZeroTol)) return Real(kInfinity);
    s += q[i] * log_in(base, q[i] / qp[i]);
  }
  return std::max(s, Real(0));
}

template <typename Real>
ExtendedReal cdiv(const DivergenceSpec& spec, const ProbDist<Real>& q, const ProbDist<Real>& qp,
                  LogBase base = LogBase::two) {
  detail::require_same_dim(q.dim(), qp.dim(), "cdiv");
  using std::sqrt;
  switch (spec.kind()) {
    case DivergenceKind::trace:
      return static_cast<double>(kolmogorov_distance(q, qp));
    case DivergenceKind::infidelity:
      return static_cast<double>(classical_infidelity(q, qp));
    case DivergenceKind::renyi_sandwiched:
      return static_cast<double>(
          classical_renyi_divergence(q, qp, static_cast<Real>(spec.order()), base));
    case DivergenceKind::tsallis: {
      const Real a = static_cast<Real>(spec.order());
      return static_cast<double>(renyi_overlap_deficit(q, qp, a) / (Real(1) - a));
    }
    case DivergenceKind::relative_entropy:
      return static_cast<double>(kl_divergence(q, qp, base));
    case DivergenceKind::hilbert_schmidt:
      return static_cast<double>((q.probs() - qp.probs()).norm());
  }
  throw Error(ErrorCode::InvalidArgument, "unknown divergence kind");
}

// ---------------------------------------------------------------------------
// Quantum divergences.

/// ½ tr|ρ1 - ρ2|.
template <typename Real>
Real trace_distance(const DensityMatrix<Real>& rho1, const DensityMatrix<Real>& rho2) {
  detail::require_same_dim(rho1.dim(), rho2.dim(), "trace_distance");
  const CMatrix<Real> diff = rho1.matrix() - rho2.matrix();
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(diff, Eigen::EigenvaluesOnly);
  return std::min(Real(0.5) * es.eigenvalues().cwiseAbs().sum(), Real(1));
}

/// sqrt(1 - F²).
template <typename Real>
Real infidelity(const DensityMatrix<Real>& rho1, const DensityMatrix<Real>& rho2) {
  const Real f = fidelity(rho1, rho2);
  using std::sqrt;
  return sqrt(std::max(Real(1) - f * f, Real(0)));
}

/// tr[(σ^γ ρ σ^γ)^α] with γ = (1-α)/(2α), pseudo-powers on the support.
/// Evaluated as Σ s_i^(2α) over the singular values of sqrt(ρ) σ^γ, which
/// avoids raising eigenvalue round-off to a fractional power.
template <typename Real>
Real sandwiched_overlap(const DensityMatrix<Real>& rho, const DensityMatrix<Real>& sigma,
                        Real alpha) {
  const Real gamma = (Real(1) - alpha) / (Real(2) * alpha);
  const CMatrix<Real> x = rho.sqrt() * sigma.power(gamma);
  Eigen::JacobiSVD<CMatrix<Real>> svd(x);
  const RVector<Real>& sv = svd.singularValues();
  const Real cutoff = sv.size() > 0 ? sv[0] * std::numeric_limits<Real>::epsilon() * Real(8) : Real(0);
  Real q(0);
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    using std::pow;
    if (sv[i] > cutoff) q += pow(sv[i], Real(2) * alpha);
  }
  return q;
}

/// Sandwiched Rényi divergence for 1/2 <= α < 1; +inf for orthogonal supports.
template <typename Real>
Real sandwiched_renyi(const DensityMatrix<Real>& rho, const DensityMatrix<Real>& sigma,
                      Real alpha, LogBase base = LogBase::two) {
  detail::require_same_dim(rho.dim(), sigma.dim(), "sandwiched_renyi");
  const Real q = sandwiched_overlap(rho, sigma, alpha);
  if (q <= Real(0)) return Real(kInfinity);
  return std::max(log_in(base, q) / (alpha - Real(1)), Real(0));
}

/// tr(ρ^α σ^(1-α)), evaluated on the two spectra; 0^0 := 0 so ρ^0 is the
/// support projector.
template <typename Real>
Real petz_overlap(const DensityMatrix<Real>& rho, const DensityMatrix<Real>& sigma,
                  Real alpha) {
  detail::require_same_dim(rho.dim(), sigma.dim(), "petz_overlap");
  const RMatrix<Real> w = detail::eigen_overlaps(rho, sigma);
  const Eigen::Index d = rho.dim();
  RVector<Real> a(d);
  RVector<Real> b(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    a[i] = detail::support_pow(rho.eigenvalues()[i], alpha);
    b[i] = detail::support_pow(sigma.eigenvalues()[i], Real(1) - alpha);
  }
  return a.dot(w * b);
}

/// (1 - tr(ρ^α σ^(1-α))) / (1 - α) for 0 <= α < 1.
template <typename Real>
Real tsallis_relative_entropy(const DensityMatrix<Real>& rho,
                              const DensityMatrix<Real>& sigma, Real alpha) {
  return std::max((Real(1) - petz_overlap(rho, sigma, alpha)) / (Real(1) - alpha), Real(0));
}

/// Umegaki relative entropy tr ρ(log ρ - log σ); +inf unless supp ρ ⊆ supp σ.
template <typename Real>
Real relative_entropy(const DensityMatrix<Real>& rho, const DensityMatrix<Real>& sigma,
                      LogBase base = LogBase::two) {
  detail::require_same_dim(rho.dim(), sigma.dim(), "relative_entropy");
  const RMatrix<Real> w = detail::eigen_overlaps(rho, sigma);
  const RVector<Real>& lam = rho.eigenvalues();
  const RVector<Real>& mu = sigma.eigenvalues();
  // mass[k] = <v_k|ρ|v_k> for the eigenvectors v_k of σ.
  const RVector<Real> mass = w.transpose() * lam;
  Real cross(0);
  for (Eigen::Index k = 0; k < mu.size(); ++k) {
    if (mu[k] <= Real(kZeroTol)) {
      if (mass[k] > Real(detail::kSupportTol)) return Real(kInfinity);
      continue;
    }
    cross += mass[k] * log_in(base, mu[k]);
  }
  const Real neg_entropy = -entropy_of<Real>(lam, base);
  return std::max(neg_entropy - cross, Real(0));
}

/// sqrt(tr(ρ1 - ρ2)²).
template <typename Real>
Real hilbert_schmidt_distance(const DensityMatrix<Real>& rho1,
                              const DensityMatrix<Real>& rho2) {
  detail::require_same_dim(rho1.dim(), rho2.dim(), "hilbert_schmidt_distance");
  return (rho1.matrix() - rho2.matrix()).norm();
}

template <typename Real>
ExtendedReal qdiv(const DivergenceSpec& spec, const DensityMatrix<Real>& rho1,
                  const DensityMatrix<Real>& rho2, LogBase base = LogBase::two) {
  detail::require_same_dim(rho1.dim(), rho2.dim(), "qdiv");
  switch (spec.kind()) {
    case DivergenceKind::trace:
      return static_cast<double>(trace_distance(rho1, rho2));
    case DivergenceKind::infidelity:
      return static_cast<double>(infidelity(rho1, rho2));
    case DivergenceKind::renyi_sandwiched:
      return static_cast<double>(
          sandwiched_renyi(rho1, rho2, static_cast<Real>(spec.order()), base));
    case DivergenceKind::tsallis:
      return static_cast<double>(
          tsallis_relative_entropy(rho1, rho2, static_cast<Real>(spec.order())));
    case DivergenceKind::relative_entropy:
      return static_cast<double>(relative_entropy(rho1, rho2, base));
    case DivergenceKind::hilbert_schmidt:
      return static_cast<double>(hilbert_schmidt_distance(rho1, rho2));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown divergence kind");
}

// ---------------------------------------------------------------------------
// Gauge maps.

/// G_D(x): the value of D on two pure states with infidelity x.
double gauge(const DivergenceSpec& spec, double infidelity, LogBase base = LogBase::two);

/// G_D^{-1}(value), clipped to [0, 1]. Throws NotGaugeable for relative
/// entropy and Hilbert-Schmidt.
double gauge_inverse(const DivergenceSpec& spec, ExtendedReal value,
                     LogBase base = LogBase::two);

}  // namespace deur

#endif  // DEUR_DIVERGENCE_HPP
