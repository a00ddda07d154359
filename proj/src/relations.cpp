#include "deur/relations.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include "deur/sampling.hpp"
#include "deur/uncertainty.hpp"

namespace deur {

namespace {

constexpr std::array<std::pair<RelationKind, std::string_view>, 10> kRelationNames{{
    {RelationKind::U_tr, "U_tr"},
    {RelationKind::U_tr_prime, "U_tr_prime"},
    {RelationKind::U_rd, "U_rd"},
    {RelationKind::U_if, "U_if"},
    {RelationKind::U_ts, "U_ts"},
    {RelationKind::U_re, "U_re"},
    {RelationKind::U_hs, "U_hs"},
    {RelationKind::THM1_UNIVERSAL, "THM1_UNIVERSAL"},
    {RelationKind::EUR_TS, "EUR_TS"},
    {RelationKind::EUR_MU, "EUR_MU"},
}};

constexpr std::array<double, 11> kDefaultGrid{0.50, 0.55, 0.60, 0.65, 0.70, 0.75,
                                              0.80, 0.85, 0.90, 0.95, 0.99};

void require_alpha(std::optional<double> alpha, double lo, double hi, const char* what) {
  if (!alpha || !(*alpha >= lo && *alpha < hi)) {
    std::ostringstream os;
    os << what << " requires " << lo << " <= alpha < " << hi;
    throw Error(ErrorCode::AlphaOutOfRange, os.str());
  }
}

double neg_log(double c, LogBase base) { return -log_in(base, c); }

}  // namespace

std::string_view to_string(RelationKind kind) {
  for (const auto& [k, name] : kRelationNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::string_view to_string(Variant variant) {
  return variant == Variant::canonical ? "canonical" : "printed";
}

std::optional<RelationKind> relation_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kRelationNames) {
    if (n == name) return k;
  }
  if (name == "U_tr'" || name == "U_trp") return RelationKind::U_tr_prime;
  if (name == "MU") return RelationKind::EUR_MU;
  return std::nullopt;
}

std::optional<Variant> variant_from_string(std::string_view name) {
  if (name == "canonical") return Variant::canonical;
  if (name == "printed") return Variant::printed;
  return std::nullopt;
}

RelationId RelationId::make(RelationKind kind, Variant variant, std::optional<double> alpha,
                            std::optional<double> beta) {
  if (variant == Variant::printed && !has_printed_variant(kind)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(to_string(kind)) + " has no separate printed form");
  }
  switch (kind) {
    case RelationKind::U_rd:
      require_alpha(alpha, 0.5, 1.0, "U_rd");
      break;
    case RelationKind::U_ts:
    case RelationKind::EUR_TS:
      require_alpha(alpha, 0.0, 1.0, kind == RelationKind::U_ts ? "U_ts" : "EUR_TS");
      break;
    case RelationKind::EUR_MU: {
      const double a = alpha.value_or(1.0);
      const double b = beta.value_or(alpha ? a / (2.0 * a - 1.0) : 1.0);
      if (!(a >= 0.5 && b >= 0.5) || !std::isfinite(a) || !std::isfinite(b) ||
          std::abs(1.0 / a + 1.0 / b - 2.0) > 1e-9) {
        throw Error(ErrorCode::AlphaOutOfRange,
                    "EUR_MU requires alpha, beta >= 1/2 with 1/alpha + 1/beta = 2");
      }
      return RelationId(kind, variant, a, b);
    }
    default:
      if (alpha) {
        throw Error(ErrorCode::AlphaOutOfRange,
                    std::string(to_string(kind)) + " takes no alpha");
      }
  }
  if (beta) {
    throw Error(ErrorCode::AlphaOutOfRange, std::string(to_string(kind)) + " takes no beta");
  }
  return RelationId(kind, variant, alpha, beta);
}

std::string RelationId::label() const {
  std::ostringstream os;
  os << to_string(kind_) << "[" << to_string(variant_);
  if (alpha_) os << ",alpha=" << *alpha_;
  if (beta_) os << ",beta=" << *beta_;
  os << "]";
  return os.str();
}

RelationVerdict RelationVerdict::from_sides(ExtendedReal lhs, ExtendedReal rhs) {
  RelationVerdict v;
  v.lhs = lhs;
  v.rhs = rhs;
  if (std::isinf(lhs)) {
    v.margin = kInfinity;
  } else if (std::isinf(rhs)) {
    v.margin = -kInfinity;
  } else {
    v.margin = lhs - rhs;
  }
  double scale = 1.0;
  if (std::isfinite(lhs)) scale = std::max(scale, std::abs(lhs));
  if (std::isfinite(rhs)) scale = std::max(scale, std::abs(rhs));
  v.satisfied = v.margin >= -kVerdictRelTol * scale;
  return v;
}

std::span<const double> default_alpha_grid() { return kDefaultGrid; }

double universal_bound(const ProbDistd& q, const ProbDistd& qp,
                       std::span<const double> alpha_grid) {
  detail::require_same_dim(q.dim(), qp.dim(), "universal_bound");
  double best = std::max(kolmogorov_distance(q, qp), classical_infidelity(q, qp));
  for (const double a : alpha_grid) {
    if (!(a >= 0.0 && a < 1.0)) {
      throw Error(ErrorCode::AlphaOutOfRange, "alpha grid values must lie in [0, 1)");
    }
    // With s = Σ q^a q'^(1-a): gauged Tsallis sqrt(1 - s), gauged Rényi
    // sqrt(1 - s^(1/a)) (the latter only in the Rényi range a >= 1/2).
    const double deficit = renyi_overlap_deficit(q, qp, a);
    best = std::max(best, std::sqrt(deficit));
    if (a >= 0.5) {
      const double r = deficit >= 1.0 ? 1.0 : -std::expm1(std::log1p(-deficit) / a);
      best = std::max(best, std::sqrt(std::max(r, 0.0)));
    }
  }
  return std::clamp(best, 0.0, 1.0);
}

namespace {

RelationVerdict eval_unchecked(const RelationId& rel, const ProbDistd& p, const ProbDistd& q,
                               const ProbDistd& qp, const OverlapMatrixd* c,
                               const EvalOptions& opts) {
  const LogBase base = opts.base;
  switch (rel.kind()) {
    case RelationKind::U_tr:
      return RelationVerdict::from_sides(delta_uncertainty(p), kolmogorov_distance(q, qp));
    case RelationKind::U_tr_prime:
      return RelationVerdict::from_sides(half_norm_uncertainty(p), kolmogorov_distance(q, qp));
    case RelationKind::U_rd: {
      const double a = *rel.alpha();
      return RelationVerdict::from_sides(renyi_entropy(p, 1.0 / a, base),
                                         classical_renyi_divergence(q, qp, a, base));
    }
    case RelationKind::U_if:
      if (rel.variant() == Variant::printed) {
        return RelationVerdict::from_sides(renyi_entropy(p, 0.5, base),
                                           classical_renyi_divergence(q, qp, 2.0, base));
      }
      return RelationVerdict::from_sides(renyi_entropy(p, 2.0, base),
                                         classical_renyi_divergence(q, qp, 0.5, base));
    case RelationKind::U_ts: {
      const double a = *rel.alpha();
      double lhs = renyi_entropy(p, 2.0 - a, base);
      if (rel.variant() == Variant::printed) lhs /= (2.0 - a);
      return RelationVerdict::from_sides(lhs, classical_renyi_divergence(q, qp, a, base));
    }
    case RelationKind::U_re:
      return RelationVerdict::from_sides(shannon_entropy(p, base), kl_divergence(q, qp, base));
    case RelationKind::U_hs:
      return RelationVerdict::from_sides(delta_uncertainty(p), (q.probs() - qp.probs()).norm());
    case RelationKind::THM1_UNIVERSAL:
      return RelationVerdict::from_sides(delta_uncertainty(p),
                                         universal_bound(q, qp, opts.alpha_grid));
    case RelationKind::EUR_TS: {
      const double a = *rel.alpha();
      const double rhs = neg_log(c->cmax(), base);
      if (rel.variant() == Variant::printed) {
        return RelationVerdict::from_sides(
            renyi_entropy(q, 2.0 - a, base) / (2.0 - a) + renyi_entropy(p, a, base), rhs);
      }
      return RelationVerdict::from_sides(
          renyi_entropy(p, 2.0 - a, base) + renyi_entropy(q, a, base), rhs);
    }
    case RelationKind::EUR_MU:
      return RelationVerdict::from_sides(
          renyi_entropy(p, *rel.alpha(), base) + renyi_entropy(q, *rel.beta(), base),
          neg_log(c->cmax(), base));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown relation");
}

}  // namespace

RelationVerdict eval_relation(const RelationId& rel, const ProbDistd& p, const ProbDistd& q,
                              const ProbDistd& qp, const OverlapMatrixd* c,
                              const EvalOptions& opts) {
  detail::require_same_dim(p.dim(), q.dim(), "eval_relation");
  detail::require_same_dim(q.dim(), qp.dim(), "eval_relation");
  if (rel.needs_overlap() && c == nullptr) {
    throw Error(ErrorCode::MissingOverlap, rel.label() + " needs the overlap matrix");
  }
  if (c != nullptr) {
    detail::require_same_dim(p.dim(), c->dim(), "eval_relation");
    const RVectord expected = c->entries().transpose() * p.probs();
    if ((expected - qp.probs()).cwiseAbs().maxCoeff() > 1e-9) {
      throw Error(ErrorCode::InconsistentTriple,
                  "q' differs from the sequential distribution of p");
    }
  }
  return eval_unchecked(rel, p, q, qp, c, opts);
}

std::pair<RelationVerdict, RelationVerdict> eval_with_dual(const RelationId& rel,
                                                           const ProbDistd& p,
                                                           const ProbDistd& q,
                                                           const OverlapMatrixd& c,
                                                           const EvalOptions& opts) {
  detail::require_same_dim(p.dim(), q.dim(), "eval_with_dual");
  detail::require_same_dim(p.dim(), c.dim(), "eval_with_dual");
  const ProbDistd qp = sequential_dist(p, c, Direction::forward);
  const RelationVerdict forward = eval_unchecked(rel, p, q, qp, &c, opts);
  if (rel.kind() == RelationKind::EUR_MU) return {forward, forward};
  const ProbDistd pp = sequential_dist(q, c, Direction::backward);
  const OverlapMatrixd ct = c.transposed();
  return {forward, eval_unchecked(rel, q, p, pp, &ct, opts)};
}

double dpi_margin(const DivergenceSpec& spec, const DensityMatrixd& rho,
                  const OrthonormalBasisd& a, const OrthonormalBasisd& b, LogBase base) {
  const DensityMatrixd rho_a = dephase(rho, a);
  const double quantum = qdiv(spec, rho, rho_a, base);
  const double classical = cdiv(spec, outcome_dist(rho, b), outcome_dist(rho_a, b), base);
  if (std::isinf(quantum) && std::isinf(classical)) return 0.0;
  if (std::isinf(quantum)) return kInfinity;
  if (std::isinf(classical)) return -kInfinity;
  return quantum - classical;
}

namespace {

struct ChunkResult {
  std::optional<Counterexample> found;
};

ChunkResult search_chunk(const RelationId& rel, int dim, std::uint64_t begin,
                         std::uint64_t end, std::uint64_t seed, std::uint64_t chunk,
                         const EvalOptions& opts) {
  Rng rng(seed, chunk);
  for (std::uint64_t i = begin; i < end; ++i) {
    DensityMatrixd rho = (i % 2 == 0) ? sample_pure_state<double>(dim, rng)
                                      : sample_mixed_state<double>(dim, rng);
    OrthonormalBasisd a = sample_haar_basis<double>(dim, rng);
    OrthonormalBasisd b = sample_haar_basis<double>(dim, rng);
    const ProbDistd p = outcome_dist(rho, a);
    const ProbDistd q = outcome_dist(rho, b);
    const OverlapMatrixd c = overlap_matrix(a, b);
    const ProbDistd qp = sequential_dist(p, c);
    const RelationVerdict v = eval_unchecked(rel, p, q, qp, &c, opts);
    if (v.margin < kCounterexampleMargin) {
      return {Counterexample{std::move(rho), std::move(a), std::move(b), v, i}};
    }
  }
  return {};
}

}  // namespace

std::optional<Counterexample> search_counterexample(const RelationId& rel, int dim,
                                                    std::uint64_t budget, std::uint64_t seed,
                                                    const EvalOptions& opts,
                                                    unsigned workers) {
  if (budget < 1) throw Error(ErrorCode::InvalidArgument, "search budget must be >= 1");
  if (dim < 2) throw Error(ErrorCode::DimensionTooSmall, "search needs d >= 2");
  const std::uint64_t chunks = (budget + kSearchChunk - 1) / kSearchChunk;
  std::vector<ChunkResult> results(chunks);
  // Chunks past the lowest one with a hit need not run.
  std::atomic<std::uint64_t> first_hit{std::numeric_limits<std::uint64_t>::max()};
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::uint64_t k = next.fetch_add(1);
      if (k >= chunks || k > first_hit.load()) return;
      const std::uint64_t begin = k * kSearchChunk;
      const std::uint64_t end = std::min(budget, begin + kSearchChunk);
      results[k] = search_chunk(rel, dim, begin, end, seed, k, opts);
      if (results[k].found) {
        std::uint64_t cur = first_hit.load();
        while (k < cur && !first_hit.compare_exchange_weak(cur, k)) {
        }
      }
    }
  };
  workers = std::max(1u, workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& r : results) {
    if (r.found) return std::move(r.found);
  }
  return std::nullopt;
}

}  // namespace deur
