#ifndef DEUR_EXPERIMENTS_HPP
#define DEUR_EXPERIMENTS_HPP

// Monte-Carlo feasible-region volumes, qubit region grids, coherence bounds
// and the finite-shot coherence estimation protocol.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "deur/qstate.hpp"
#include "deur/relations.hpp"

namespace deur {

struct VolumeEstimate {
  RelationId relation;
  int dim = 2;
  std::uint64_t samples = 0;
  std::uint64_t accepted = 0;
  double volume = 0.0;
  double std_error = 0.0;  // sqrt(v(1 - v)/n)
  std::uint64_t seed = 0;
};

struct VolumeOptions {
  EvalOptions eval{};
  unsigned workers = 1;
};

inline constexpr std::uint64_t kVolumeChunk = 16384;
inline constexpr std::uint64_t kMinVolumeSamples = 1000;

/// True iff the relation and its dual both hold on (p, q, C).
bool admissible(const RelationId& rel, const ProbDistd& p, const ProbDistd& q,
                const OverlapMatrixd& c, const EvalOptions& opts = {});

/// Fraction of the data-parameter space admitted by `rel` and its dual.
///
/// d = 2: (p0, q0, c00) uniform on the unit cube. d = 3: p and q uniform on
/// the simplex and C = |U|² for Haar U. Sample i is drawn from stream
/// (seed, i / kVolumeChunk); the estimate does not depend on `workers`.
VolumeEstimate estimate_volume(const RelationId& rel, int dim, std::uint64_t samples,
                               std::uint64_t seed, const VolumeOptions& opts = {});

/// Same as estimate_volume for several relations on one shared sample stream;
/// element k equals estimate_volume(rels[k], ...).
std::vector<VolumeEstimate> estimate_volumes(std::span<const RelationId> rels, int dim,
                                             std::uint64_t samples, std::uint64_t seed,
                                             const VolumeOptions& opts = {});

/// The seven relations of the volume comparison table, in table order, with
/// the variants that reproduce it (canonical forms).
std::vector<RelationId> table2_relations();

/// Reference volumes for table2_relations() at d = 2 or 3.
std::vector<double> reference_volumes(int dim);

struct RegionGrid {
  RelationId relation;
  double c00 = 0.0;
  int resolution = 0;
  std::vector<std::uint8_t> cells;  // row-major: index i * resolution + j

  double p0(int i) const { return static_cast<double>(i) / (resolution - 1); }
  double q0(int j) const { return static_cast<double>(j) / (resolution - 1); }
  bool at(int i, int j) const { return cells[static_cast<std::size_t>(i) * resolution + j] != 0; }
};

/// Qubit admissibility over p0 = i/(res-1), q0 = j/(res-1) at fixed c00.
RegionGrid region_grid(const RelationId& rel, double c00, int resolution,
                       const EvalOptions& opts = {});

struct CoherenceBounds {
  double upper = 0.0;         // H(p)
  double exact = 0.0;         // S(ρ‖ρ_A) = H(p) - S(ρ)
  ExtendedReal lower = 0.0;   // KL(q‖q')
  LogBase base = LogBase::two;
};

CoherenceBounds coherence_bounds(const DensityMatrixd& rho, const OrthonormalBasisd& a,
                                 const OrthonormalBasisd& b, LogBase base = LogBase::two);

enum class ShotKind { direct_B, sequential_AB };

/// Outcome counts; sequential counts are d x d row-major (A outcome, B outcome).
struct ShotCounts {
  ShotKind kind = ShotKind::direct_B;
  int dim = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::uint64_t seed = 0;

  static ShotCounts make(ShotKind kind, int dim, std::vector<std::uint64_t> counts,
                         std::uint64_t seed = 0);
};

/// Multinomial shots: over q = outcome_dist(ρ, B) when `a` is absent, or
/// over the joint p_i c_ij of measuring A then B.
ShotCounts simulate_shots(const DensityMatrixd& rho, const OrthonormalBasisd* a,
                          const OrthonormalBasisd& b, std::uint64_t n, std::uint64_t seed);

struct CoherenceEstimate {
  ExtendedReal lower = 0.0;  // KL(q̂‖q̂'), +inf on support violation
  double upper = 0.0;        // H(p̂)
  bool lower_unbounded = false;
};

inline constexpr double kDefaultSmoothing = 0.5;

/// Plug-in coherence bounds from direct-B and sequential A->B counts, each
/// marginal smoothed with `smoothing` pseudo-counts per cell.
CoherenceEstimate estimate_coherence(const ShotCounts& direct, const ShotCounts& sequential,
                                     double smoothing = kDefaultSmoothing,
                                     LogBase base = LogBase::two);

}  // namespace deur

#endif  // DEUR_EXPERIMENTS_HPP
