#ifndef DEUR_SAMPLING_HPP
#define DEUR_SAMPLING_HPP

#include <Eigen/QR>

#include <cstdint>
#include <variant>

#include "deur/qstate.hpp"
#include "deur/rng.hpp"

namespace deur {

namespace detail {

inline void require_sample_dim(Eigen::Index d) {
  if (d < 2) throw Error(ErrorCode::DimensionTooSmall, "sampling needs d >= 2");
}

template <typename Real>
CMatrix<Real> ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  CMatrix<Real> g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Real re = static_cast<Real>(rng.normal());
      const Real im = static_cast<Real>(rng.normal());
      g(i, j) = Complex<Real>(re, im);
    }
  }
  return g;
}

}  // namespace detail

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of diag(R) moved into Q.
template <typename Real>
CMatrix<Real> haar_unitary(Eigen::Index d, Rng& rng) {
  detail::require_sample_dim(d);
  const CMatrix<Real> g = detail::ginibre<Real>(d, d, rng);
  Eigen::HouseholderQR<CMatrix<Real>> qr(g);
  CMatrix<Real> q = qr.householderQ();
  const CMatrix<Real>& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < d; ++k) {
    using std::abs;
    const Complex<Real> rkk = r(k, k);
    const Real mag = abs(rkk);
    if (mag > Real(0)) q.col(k) *= rkk / mag;
  }
  return q;
}

template <typename Real>
OrthonormalBasis<Real> sample_haar_basis(Eigen::Index d, Rng& rng) {
  return OrthonormalBasis<Real>::from_columns(haar_unitary<Real>(d, rng));
}

/// Uniformly distributed pure state (normalized complex Gaussian vector).
template <typename Real>
DensityMatrix<Real> sample_pure_state(Eigen::Index d, Rng& rng) {
  detail::require_sample_dim(d);
  const CVector<Real> v = detail::ginibre<Real>(d, 1, rng).col(0);
  return DensityMatrix<Real>::pure(v);
}

/// Mixed state from the Hilbert-Schmidt measure: G G† / tr(G G†).
template <typename Real>
DensityMatrix<Real> sample_mixed_state(Eigen::Index d, Rng& rng) {
  detail::require_sample_dim(d);
  const CMatrix<Real> g = detail::ginibre<Real>(d, d, rng);
  CMatrix<Real> m = g * g.adjoint();
  m /= m.trace().real();
  return DensityMatrix<Real>::from_matrix((m + m.adjoint()) * Real(0.5));
}

/// Uniform point on the (d-1)-simplex, i.e. Dirichlet(1, ..., 1).
template <typename Real>
ProbDist<Real> sample_simplex(Eigen::Index d, Rng& rng) {
  detail::require_sample_dim(d);
  RVector<Real> x(d);
  for (Eigen::Index i = 0; i < d; ++i) x[i] = static_cast<Real>(rng.exponential());
  x /= x.sum();
  return ProbDist<Real>::from_probs(std::move(x));
}

enum class SampleKind { haar_state_pure, haar_state_mixed, haar_unitary_basis, simplex };

template <typename Real>
using Sample = std::variant<DensityMatrix<Real>, OrthonormalBasis<Real>, ProbDist<Real>>;

/// One draw of `kind` from stream 0 of `seed`.
template <typename Real = double>
Sample<Real> sample(SampleKind kind, Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  switch (kind) {
    case SampleKind::haar_state_pure: return sample_pure_state<Real>(d, rng);
    case SampleKind::haar_state_mixed: return sample_mixed_state<Real>(d, rng);
    case SampleKind::haar_unitary_basis: return sample_haar_basis<Real>(d, rng);
    case SampleKind::simplex: return sample_simplex<Real>(d, rng);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown sample kind");
}

}  // namespace deur

#endif  // DEUR_SAMPLING_HPP
