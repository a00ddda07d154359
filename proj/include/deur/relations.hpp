#ifndef DEUR_RELATIONS_HPP
#define DEUR_RELATIONS_HPP

// Catalog of uncertainty-disturbance trade-offs and entropic uncertainty
// relations, evaluated on (p, q, q') triples.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deur/divergence.hpp"
#include "deur/qstate.hpp"

namespace deur {

enum class RelationKind {
  U_tr,
  U_tr_prime,
  U_rd,
  U_if,
  U_ts,
  U_re,
  U_hs,
  THM1_UNIVERSAL,
  EUR_TS,
  EUR_MU,
};

enum class Variant { canonical, printed };

std::string_view to_string(RelationKind kind);
std::string_view to_string(Variant variant);
std::optional<RelationKind> relation_kind_from_string(std::string_view name);
std::optional<Variant> variant_from_string(std::string_view name);

/// A relation with its variant and order parameters.
///
/// Parameter ranges: U_rd needs 1/2 <= alpha < 1; U_ts and EUR_TS need
/// 0 <= alpha < 1; EUR_MU needs alpha, beta >= 1/2 with 1/alpha + 1/beta = 2
/// (defaults to alpha = beta = 1). The printed variant exists only for
/// U_if, U_ts and EUR_TS, whose printed forms differ from the derivation.
class RelationId {
 public:
  static RelationId make(RelationKind kind, Variant variant = Variant::canonical,
                         std::optional<double> alpha = {}, std::optional<double> beta = {});

  static RelationId u_tr() { return make(RelationKind::U_tr); }
  static RelationId u_tr_prime() { return make(RelationKind::U_tr_prime); }
  static RelationId u_rd(double alpha) { return make(RelationKind::U_rd, Variant::canonical, alpha); }
  static RelationId u_if(Variant v = Variant::canonical) { return make(RelationKind::U_if, v); }
  static RelationId u_ts(double alpha, Variant v = Variant::canonical) {
    return make(RelationKind::U_ts, v, alpha);
  }
  static RelationId u_re() { return make(RelationKind::U_re); }
  static RelationId u_hs() { return make(RelationKind::U_hs); }
  static RelationId thm1() { return make(RelationKind::THM1_UNIVERSAL); }
  static RelationId eur_ts(double alpha, Variant v = Variant::canonical) {
    return make(RelationKind::EUR_TS, v, alpha);
  }
  static RelationId eur_mu(double alpha = 1.0, double beta = 1.0) {
    return make(RelationKind::EUR_MU, Variant::canonical, alpha, beta);
  }

  static bool has_printed_variant(RelationKind kind) {
    return kind == RelationKind::U_if || kind == RelationKind::U_ts ||
           kind == RelationKind::EUR_TS;
  }

  RelationKind kind() const { return kind_; }
  Variant variant() const { return variant_; }
  std::optional<double> alpha() const { return alpha_; }
  std::optional<double> beta() const { return beta_; }
  bool needs_overlap() const {
    return kind_ == RelationKind::EUR_TS || kind_ == RelationKind::EUR_MU;
  }

  /// e.g. "U_ts[canonical,alpha=0.5]".
  std::string label() const;

  friend bool operator==(const RelationId&, const RelationId&) = default;

 private:
  RelationId(RelationKind kind, Variant variant, std::optional<double> alpha,
             std::optional<double> beta)
      : kind_(kind), variant_(variant), alpha_(alpha), beta_(beta) {}

  RelationKind kind_;
  Variant variant_;
  std::optional<double> alpha_;
  std::optional<double> beta_;
};

/// Outcome of evaluating lhs >= rhs. margin = lhs - rhs with +inf on the
/// left winning; satisfied iff margin >= -1e-9 max(1, |lhs|, |rhs|) over the
/// finite sides.
struct RelationVerdict {
  ExtendedReal lhs = 0.0;
  ExtendedReal rhs = 0.0;
  double margin = 0.0;
  bool satisfied = true;

  static RelationVerdict from_sides(ExtendedReal lhs, ExtendedReal rhs);
};

inline constexpr double kVerdictRelTol = 1e-9;

/// {0.50, 0.55, ..., 0.95, 0.99}.
std::span<const double> default_alpha_grid();

struct EvalOptions {
  LogBase base = LogBase::two;
  /// Orders maximized over by the universal bound.
  std::span<const double> alpha_grid = default_alpha_grid();
};

/// Evaluates `rel` on (p, q, q'). When `c` is given, q' must equal the
/// forward sequential distribution of p within 1e-9 (InconsistentTriple);
/// EUR_* relations require `c` (MissingOverlap).
RelationVerdict eval_relation(const RelationId& rel, const ProbDistd& p, const ProbDistd& q,
                              const ProbDistd& qp, const OverlapMatrixd* c = nullptr,
                              const EvalOptions& opts = {});

/// Forward verdict on (p, q, Cᵀp) and dual verdict on (q, p, Cq). EUR_MU is
/// evaluated once and returned twice.
std::pair<RelationVerdict, RelationVerdict> eval_with_dual(const RelationId& rel,
                                                           const ProbDistd& p,
                                                           const ProbDistd& q,
                                                           const OverlapMatrixd& c,
                                                           const EvalOptions& opts = {});

/// Largest gauged classical disturbance: max of the Kolmogorov distance, the
/// classical infidelity, and the gauged Rényi and Tsallis divergences over
/// `alpha_grid`.
double universal_bound(const ProbDistd& q, const ProbDistd& qp,
                       std::span<const double> alpha_grid = default_alpha_grid());

/// qdiv(spec, ρ, ρ_A) - cdiv(spec, q, q') for B-statistics q of ρ and q'
/// of ρ_A. Nonnegative up to round-off by data processing.
double dpi_margin(const DivergenceSpec& spec, const DensityMatrixd& rho,
                  const OrthonormalBasisd& a, const OrthonormalBasisd& b,
                  LogBase base = LogBase::two);

struct Counterexample {
  DensityMatrixd rho;
  OrthonormalBasisd a;
  OrthonormalBasisd b;
  RelationVerdict verdict;
  std::uint64_t index = 0;  // global sample index of the instance
};

inline constexpr double kCounterexampleMargin = -1e-6;

/// Samples (ρ, A, B) with Haar bases, alternating pure (even index) and
/// Hilbert-Schmidt mixed (odd index) states, and returns the lowest-indexed
/// instance whose forward margin is below -1e-6. Sample i belongs to chunk
/// i / kSearchChunk and is drawn from stream (seed, chunk).
std::optional<Counterexample> search_counterexample(const RelationId& rel, int dim,
                                                    std::uint64_t budget, std::uint64_t seed,
                                                    const EvalOptions& opts = {},
                                                    unsigned workers = 1);

inline constexpr std::uint64_t kSearchChunk = 4096;

}  // namespace deur

#endif  // DEUR_RELATIONS_HPP
