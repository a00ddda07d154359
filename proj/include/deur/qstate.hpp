#ifndef DEUR_QSTATE_HPP
#define DEUR_QSTATE_HPP

// States, bases, dephasing channels and sequential measurement statistics.
// All types are immutable after construction and templated on the real
// scalar; the aliases at the bottom fix Real = double.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>

#include "deur/core.hpp"

namespace deur {

template <typename Real>
using Complex = std::complex<Real>;
template <typename Real>
using CMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

namespace detail {

template <typename Real>
Real hermitian_defect(const CMatrix<Real>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": dimension " + std::to_string(a) +
                    " does not match " + std::to_string(b));
  }
}

}  // namespace detail

/// Probability vector over d outcomes.
template <typename Real>
class ProbDist {
 public:
  /// Validates sum = 1 and entries in [0, 1] within `tol`, then clips and
  /// renormalizes.
  static ProbDist from_probs(RVector<Real> probs, Real tol = Real(kValidationTol)) {
    if (probs.size() < 1) {
      throw Error(ErrorCode::DimensionTooSmall, "probability vector is empty");
    }
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      if (!(probs[i] >= -tol && probs[i] <= Real(1) + tol)) {
        throw Error(ErrorCode::NotNormalized,
                    "probability " + std::to_string(i) + " outside [0,1]");
      }
    }
    using std::abs;
    if (abs(probs.sum() - Real(1)) > tol) {
      throw Error(ErrorCode::NotNormalized, "probabilities do not sum to 1");
    }
    probs = probs.cwiseMax(Real(0)).cwiseMin(Real(1));
    probs /= probs.sum();
    return ProbDist(std::move(probs));
  }

  static ProbDist from_probs(std::initializer_list<Real> probs) {
    RVector<Real> v(static_cast<Eigen::Index>(probs.size()));
    Eigen::Index i = 0;
    for (Real x : probs) v[i++] = x;
    return from_probs(std::move(v));
  }

  static ProbDist uniform(Eigen::Index d) {
    return ProbDist(RVector<Real>::Constant(d, Real(1) / Real(d)));
  }

  Eigen::Index dim() const { return probs_.size(); }
  const RVector<Real>& probs() const { return probs_; }
  Real operator[](Eigen::Index i) const { return probs_[i]; }

 private:
  explicit ProbDist(RVector<Real> probs) : probs_(std::move(probs)) {}

  RVector<Real> probs_;
};

/// Hermitian, unit-trace, positive semidefinite matrix with a cached
/// spectral decomposition (eigenvalues clipped to [0, 1]).
template <typename Real>
class DensityMatrix {
 public:
  /// Validates and clips. Throws NotHermitian, TraceNotOne, NotPositive,
  /// DimensionTooSmall or DimensionMismatch (non-square input).
  static DensityMatrix from_matrix(const CMatrix<Real>& entries,
                                   Real tol = Real(kValidationTol)) {
    if (entries.rows() != entries.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "density matrix is not square");
    }
    if (entries.rows() < 2) {
      throw Error(ErrorCode::DimensionTooSmall, "density matrix needs d >= 2");
    }
    if (!entries.allFinite()) {
      throw Error(ErrorCode::NotHermitian, "density matrix has non-finite entries");
    }
    if (detail::hermitian_defect<Real>(entries) > tol) {
      throw Error(ErrorCode::NotHermitian, "density matrix is not Hermitian");
    }
    using std::abs;
    if (abs(entries.trace() - Complex<Real>(1)) > tol) {
      throw Error(ErrorCode::TraceNotOne, "density matrix trace differs from 1");
    }
    const CMatrix<Real> herm = (entries + entries.adjoint()) * Real(0.5);
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(herm);
    RVector<Real> evals = es.eigenvalues();
    if (evals.minCoeff() < -tol) {
      throw Error(ErrorCode::NotPositive,
                  "density matrix has a negative eigenvalue");
    }
    return DensityMatrix(herm, evals, es.eigenvectors());
  }

  /// Builds Σ_k λ_k |v_k><v_k| from a spectrum and orthonormal eigenvectors
  /// without a further eigendecomposition.
  static DensityMatrix from_spectrum(const RVector<Real>& evals,
                                     const CMatrix<Real>& evecs,
                                     Real tol = Real(kValidationTol)) {
    if (evecs.rows() != evecs.cols() || evecs.cols() != evals.size()) {
      throw Error(ErrorCode::DimensionMismatch, "spectrum and eigenvectors disagree");
    }
    if (evals.size() < 2) {
      throw Error(ErrorCode::DimensionTooSmall, "density matrix needs d >= 2");
    }
    const Eigen::Index d = evals.size();
    if ((evecs.adjoint() * evecs - CMatrix<Real>::Identity(d, d)).cwiseAbs().maxCoeff() > tol) {
      throw Error(ErrorCode::NotOrthonormal, "eigenvectors are not orthonormal");
    }
    if (evals.minCoeff() < -tol) {
      throw Error(ErrorCode::NotPositive, "spectrum has a negative eigenvalue");
    }
    using std::abs;
    if (abs(evals.sum() - Real(1)) > tol) {
      throw Error(ErrorCode::TraceNotOne, "spectrum does not sum to 1");
    }
    const RVector<Real> clipped = evals.cwiseMax(Real(0)).cwiseMin(Real(1));
    const RVector<Real> normalized = clipped / clipped.sum();
    CMatrix<Real> m = evecs * normalized.template cast<Complex<Real>>().asDiagonal() *
                      evecs.adjoint();
    m = (m + m.adjoint()).eval() * Real(0.5);
    return DensityMatrix(std::move(m), normalized, evecs);
  }

  static DensityMatrix pure(const CVector<Real>& ket) {
    const CVector<Real> v = ket / ket.norm();
    return from_matrix(v * v.adjoint());
  }

  static DensityMatrix maximally_mixed(Eigen::Index d) {
    return from_matrix(CMatrix<Real>::Identity(d, d) / Real(d));
  }

  Eigen::Index dim() const { return matrix_.rows(); }
  const CMatrix<Real>& matrix() const { return matrix_; }
  /// Eigenvalues (ordered as the eigenvector columns), clipped to [0, 1]
  /// and summing to 1.
  const RVector<Real>& eigenvalues() const { return evals_; }
  const CMatrix<Real>& eigenvectors() const { return evecs_; }

  Real purity() const { return evals_.squaredNorm(); }

  /// ρ^t on the support: eigenvalues below kZeroTol map to 0 for every t,
  /// including t = 0 (support projector).
  CMatrix<Real> power(Real exponent) const {
    RVector<Real> f(evals_.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      using std::pow;
      f[i] = evals_[i] > Real(kZeroTol) ? pow(evals_[i], exponent) : Real(0);
    }
    return apply(f);
  }

  CMatrix<Real> sqrt() const { return power(Real(0.5)); }

  CMatrix<Real> support_projector() const { return power(Real(0)); }

  /// V f V† for a function already evaluated on the spectrum.
  CMatrix<Real> apply(const RVector<Real>& f) const {
    return evecs_ * f.template cast<Complex<Real>>().asDiagonal() * evecs_.adjoint();
  }

 private:
  DensityMatrix(CMatrix<Real> herm, RVector<Real> evals, CMatrix<Real> evecs)
      : evecs_(std::move(evecs)) {
    const RVector<Real> clipped = evals.cwiseMax(Real(0)).cwiseMin(Real(1));
    evals_ = clipped / clipped.sum();
    using std::abs;
    if ((evals_ - evals).cwiseAbs().maxCoeff() > Real(0)) {
      matrix_ = apply(evals_);
      matrix_ = (matrix_ + matrix_.adjoint()).eval() * Real(0.5);
    } else {
      matrix_ = std::move(herm);
    }
  }

  CMatrix<Real> matrix_;
  RVector<Real> evals_;
  CMatrix<Real> evecs_;
};

/// d orthonormal kets stored as the columns of a unitary matrix.
template <typename Real>
class OrthonormalBasis {
 public:
  static OrthonormalBasis from_columns(const CMatrix<Real>& columns,
                                       Real tol = Real(kValidationTol)) {
    if (columns.rows() != columns.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "basis matrix is not square");
    }
    if (columns.rows() < 2) {
      throw Error(ErrorCode::DimensionTooSmall, "basis needs d >= 2");
    }
    const Eigen::Index d = columns.rows();
    const CMatrix<Real> gram = columns.adjoint() * columns;
    if ((gram - CMatrix<Real>::Identity(d, d)).cwiseAbs().maxCoeff() > tol) {
      throw Error(ErrorCode::NotOrthonormal, "basis kets are not orthonormal");
    }
    return OrthonormalBasis(columns);
  }

  /// |0>, ..., |d-1>.
  static OrthonormalBasis computational(Eigen::Index d) {
    return from_columns(CMatrix<Real>::Identity(d, d));
  }

  /// Discrete Fourier basis; for d = 2 this is {|+>, |->}.
  static OrthonormalBasis fourier(Eigen::Index d) {
    CMatrix<Real> f(d, d);
    const Real norm = Real(1) / std::sqrt(Real(d));
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index k = 0; k < d; ++k) {
        const Real phase = Real(2) * std::numbers::pi_v<Real> * Real(j * k) / Real(d);
        f(j, k) = std::polar(norm, phase);
      }
    }
    return from_columns(f);
  }

  /// Eigenbasis of a state, ordered by ascending eigenvalue.
  static OrthonormalBasis eigenbasis(const DensityMatrix<Real>& rho) {
    return from_columns(rho.eigenvectors());
  }

  Eigen::Index dim() const { return columns_.rows(); }
  const CMatrix<Real>& columns() const { return columns_; }
  auto ket(Eigen::Index i) const { return columns_.col(i); }

  CMatrix<Real> projector(Eigen::Index i) const {
    return columns_.col(i) * columns_.col(i).adjoint();
  }

 private:
  explicit OrthonormalBasis(CMatrix<Real> columns) : columns_(std::move(columns)) {}

  CMatrix<Real> columns_;
};

/// Doubly stochastic matrix of basis overlaps, rows = A outcomes,
/// columns = B outcomes.
template <typename Real>
class OverlapMatrix {
 public:
  /// Validates nonnegativity and unit row/column sums within `tol`.
  static OverlapMatrix from_entries(const RMatrix<Real>& entries,
                                    Real tol = Real(kValidationTol)) {
    if (entries.rows() != entries.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "overlap matrix is not square");
    }
    if (entries.rows() < 2) {
      throw Error(ErrorCode::DimensionTooSmall, "overlap matrix needs d >= 2");
    }
    const Eigen::Index d = entries.rows();
    if (entries.minCoeff() < -tol ||
        (entries.rowwise().sum() - RVector<Real>::Ones(d)).cwiseAbs().maxCoeff() > tol ||
        (entries.colwise().sum().transpose() - RVector<Real>::Ones(d))
                .cwiseAbs()
                .maxCoeff() > tol) {
      throw Error(ErrorCode::NotStochastic, "overlap matrix is not doubly stochastic");
    }
    return OverlapMatrix(entries.cwiseMax(Real(0)));
  }

  /// The d = 2 overlap family [[c, 1-c], [1-c, c]].
  static OverlapMatrix qubit(Real c00) {
    RMatrix<Real> m(2, 2);
    m << c00, Real(1) - c00, Real(1) - c00, c00;
    return from_entries(m);
  }

  Eigen::Index dim() const { return entries_.rows(); }
  const RMatrix<Real>& entries() const { return entries_; }
  Real operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
  Real cmax() const { return cmax_; }

  /// Overlap matrix of the swapped sequence B -> A.
  OverlapMatrix transposed() const { return OverlapMatrix(entries_.transpose()); }

 private:
  explicit OverlapMatrix(RMatrix<Real> entries)
      : entries_(std::move(entries)), cmax_(entries_.maxCoeff()) {}

  RMatrix<Real> entries_;
  Real cmax_;
};

/// p_i = <A_i|ρ|A_i>.
template <typename Real>
ProbDist<Real> outcome_dist(const DensityMatrix<Real>& rho,
                            const OrthonormalBasis<Real>& basis) {
  detail::require_same_dim(rho.dim(), basis.dim(), "outcome_dist");
  const CMatrix<Real>& u = basis.columns();
  RVector<Real> p = (u.adjoint() * rho.matrix() * u).diagonal().real();
  p = p.cwiseMax(Real(0)).cwiseMin(Real(1));
  p /= p.sum();
  return ProbDist<Real>::from_probs(std::move(p));
}

/// Φ_A(ρ) = Σ_i Π_i ρ Π_i = Σ_i p_i Π_i.
template <typename Real>
DensityMatrix<Real> dephase(const DensityMatrix<Real>& rho,
                            const OrthonormalBasis<Real>& basis) {
  const ProbDist<Real> p = outcome_dist(rho, basis);
  return DensityMatrix<Real>::from_spectrum(p.probs(), basis.columns());
}

/// c_ij = |<A_i|B_j>|².
template <typename Real>
OverlapMatrix<Real> overlap_matrix(const OrthonormalBasis<Real>& a,
                                   const OrthonormalBasis<Real>& b) {
  detail::require_same_dim(a.dim(), b.dim(), "overlap_matrix");
  return OverlapMatrix<Real>::from_entries(
      (a.columns().adjoint() * b.columns()).cwiseAbs2());
}

enum class Direction {
  forward,   // q'_j = Σ_i p_i c_ij  (A then B)
  backward,  // p'_i = Σ_j c_ij q_j  (B then A)
};

template <typename Real>
ProbDist<Real> sequential_dist(const ProbDist<Real>& dist, const OverlapMatrix<Real>& c,
                               Direction direction = Direction::forward) {
  detail::require_same_dim(dist.dim(), c.dim(), "sequential_dist");
  RVector<Real> out = direction == Direction::forward
                          ? RVector<Real>(c.entries().transpose() * dist.probs())
                          : RVector<Real>(c.entries() * dist.probs());
  out = out.cwiseMax(Real(0)).cwiseMin(Real(1));
  out /= out.sum();
  return ProbDist<Real>::from_probs(std::move(out));
}

/// Uhlmann fidelity tr sqrt(sqrt(ρ2) ρ1 sqrt(ρ2)), clamped to [0, 1]. Computed
/// as the trace norm of sqrt(ρ1) sqrt(ρ2): singular values carry absolute
/// round-off, whereas square roots of near-zero eigenvalues amplify it.
template <typename Real>
Real fidelity(const DensityMatrix<Real>& rho1, const DensityMatrix<Real>& rho2) {
  detail::require_same_dim(rho1.dim(), rho2.dim(), "fidelity");
  const CMatrix<Real> x = rho1.sqrt() * rho2.sqrt();
  Eigen::JacobiSVD<CMatrix<Real>> svd(x);
  return std::clamp(svd.singularValues().sum(), Real(0), Real(1));
}

/// -Σ x log x over entries above kZeroTol.
template <typename Real, typename Derived>
Real entropy_of(const Eigen::MatrixBase<Derived>& values, LogBase base) {
  Real h(0);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const Real x = values[i];
    if (x > Real(kZeroTol)) h -= x * log_in(base, x);
  }
  return std::max(h, Real(0));
}

template <typename Real>
Real von_neumann_entropy(const DensityMatrix<Real>& rho, LogBase base = LogBase::two) {
  return entropy_of<Real>(rho.eigenvalues(), base);
}

/// ρ ↦ U ρ U†.
template <typename Real>
DensityMatrix<Real> conjugate(const DensityMatrix<Real>& rho, const CMatrix<Real>& u) {
  detail::require_same_dim(rho.dim(), u.rows(), "conjugate");
  const CMatrix<Real> m = u * rho.matrix() * u.adjoint();
  return DensityMatrix<Real>::from_matrix((m + m.adjoint()) * Real(0.5));
}

using DensityMatrixd = DensityMatrix<double>;
using OrthonormalBasisd = OrthonormalBasis<double>;
using OverlapMatrixd = OverlapMatrix<double>;
using ProbDistd = ProbDist<double>;
using CMatrixd = CMatrix<double>;
using CVectord = CVector<double>;
using RMatrixd = RMatrix<double>;
using RVectord = RVector<double>;

}  // namespace deur

#endif  // DEUR_QSTATE_HPP
