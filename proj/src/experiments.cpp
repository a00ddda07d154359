#include "deur/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "deur/sampling.hpp"
#include "deur/uncertainty.hpp"

namespace deur {

bool admissible(const RelationId& rel, const ProbDistd& p, const ProbDistd& q,
                const OverlapMatrixd& c, const EvalOptions& opts) {
  const auto [forward, dual] = eval_with_dual(rel, p, q, c, opts);
  return forward.satisfied && dual.satisfied;
}

namespace {

struct VolumeSample {
  ProbDistd p;
  ProbDistd q;
  OverlapMatrixd c;
};

VolumeSample draw_volume_sample(int dim, Rng& rng) {
  if (dim == 2) {
    const double p0 = rng.uniform();
    const double q0 = rng.uniform();
    const double c00 = rng.uniform();
    return {ProbDistd::from_probs({p0, 1.0 - p0}), ProbDistd::from_probs({q0, 1.0 - q0}),
            OverlapMatrixd::qubit(c00)};
  }
  ProbDistd p = sample_simplex<double>(dim, rng);
  ProbDistd q = sample_simplex<double>(dim, rng);
  const CMatrixd u = haar_unitary<double>(dim, rng);
  return {std::move(p), std::move(q), OverlapMatrixd::from_entries(u.cwiseAbs2())};
}

// Runs body(k) for every chunk k on `workers` threads.
template <typename Body>
void for_each_chunk(std::uint64_t chunks, unsigned workers, Body&& body) {
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t k = next.fetch_add(1); k < chunks; k = next.fetch_add(1)) body(k);
  };
  workers = std::max(1u, workers);
  if (workers == 1) {
    work();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
}

}  // namespace

std::vector<VolumeEstimate> estimate_volumes(std::span<const RelationId> rels, int dim,
                                             std::uint64_t samples, std::uint64_t seed,
                                             const VolumeOptions& opts) {
  if (dim != 2 && dim != 3) {
    throw Error(ErrorCode::UnsupportedDim, "volume estimation supports d = 2 or 3");
  }
  if (samples < kMinVolumeSamples) {
    throw Error(ErrorCode::InvalidArgument, "volume estimation needs >= 1000 samples");
  }
  const std::uint64_t chunks = (samples + kVolumeChunk - 1) / kVolumeChunk;
  const std::size_t nrel = rels.size();
  // accepted[k * nrel + r]: per-chunk counts, summed after the parallel loop.
  std::vector<std::uint64_t> accepted(chunks * nrel, 0);
  for_each_chunk(chunks, opts.workers, [&](std::uint64_t k) {
    Rng rng(seed, k);
    const std::uint64_t begin = k * kVolumeChunk;
    const std::uint64_t end = std::min(samples, begin + kVolumeChunk);
    for (std::uint64_t i = begin; i < end; ++i) {
      const VolumeSample s = draw_volume_sample(dim, rng);
      for (std::size_t r = 0; r < nrel; ++r) {
        if (admissible(rels[r], s.p, s.q, s.c, opts.eval)) ++accepted[k * nrel + r];
      }
    }
  });
  std::vector<VolumeEstimate> out;
  out.reserve(nrel);
  for (std::size_t r = 0; r < nrel; ++r) {
    std::uint64_t total = 0;
    for (std::uint64_t k = 0; k < chunks; ++k) total += accepted[k * nrel + r];
    VolumeEstimate e{rels[r]};
    e.dim = dim;
    e.samples = samples;
    e.accepted = total;
    e.volume = static_cast<double>(total) / static_cast<double>(samples);
    e.std_error = std::sqrt(e.volume * (1.0 - e.volume) / static_cast<double>(samples));
    e.seed = seed;
    out.push_back(e);
  }
  return out;
}

VolumeEstimate estimate_volume(const RelationId& rel, int dim, std::uint64_t samples,
                               std::uint64_t seed, const VolumeOptions& opts) {
  return estimate_volumes(std::span<const RelationId>(&rel, 1), dim, samples, seed, opts)
      .front();
}

std::vector<RelationId> table2_relations() {
  return {RelationId::u_tr(),   RelationId::u_tr_prime(), RelationId::u_rd(0.5),
          RelationId::u_re(),   RelationId::u_ts(0.5),    RelationId::u_hs(),
          RelationId::eur_mu(1.0, 1.0)};
}

std::vector<double> reference_volumes(int dim) {
  if (dim == 2) return {0.930, 0.705, 0.787, 0.770, 0.814, 0.705, 0.974};
  if (dim == 3) return {0.94675, 0.94682, 0.917, 0.905, 0.937, 0.887, 0.999};
  throw Error(ErrorCode::UnsupportedDim, "reference volumes exist for d = 2 or 3");
}

RegionGrid region_grid(const RelationId& rel, double c00, int resolution,
                       const EvalOptions& opts) {
  if (resolution < 2) throw Error(ErrorCode::InvalidArgument, "resolution must be >= 2");
  if (!(c00 >= 0.0 && c00 <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "c00 must lie in [0, 1]");
  }
  RegionGrid grid{rel, c00, resolution, {}};
  grid.cells.resize(static_cast<std::size_t>(resolution) * resolution);
  const OverlapMatrixd c = OverlapMatrixd::qubit(c00);
  for (int i = 0; i < resolution; ++i) {
    const double p0 = grid.p0(i);
    const ProbDistd p = ProbDistd::from_probs({p0, 1.0 - p0});
    for (int j = 0; j < resolution; ++j) {
      const double q0 = grid.q0(j);
      const ProbDistd q = ProbDistd::from_probs({q0, 1.0 - q0});
      grid.cells[static_cast<std::size_t>(i) * resolution + j] = admissible(rel, p, q, c, opts);
    }
  }
  return grid;
}

CoherenceBounds coherence_bounds(const DensityMatrixd& rho, const OrthonormalBasisd& a,
                                 const OrthonormalBasisd& b, LogBase base) {
  detail::require_same_dim(rho.dim(), a.dim(), "coherence_bounds");
  detail::require_same_dim(rho.dim(), b.dim(), "coherence_bounds");
  const ProbDistd p = outcome_dist(rho, a);
  const ProbDistd q = outcome_dist(rho, b);
  const ProbDistd qp = sequential_dist(p, overlap_matrix(a, b));
  CoherenceBounds out;
  out.base = base;
  out.upper = shannon_entropy(p, base);
  out.exact = std::max(out.upper - von_neumann_entropy(rho, base), 0.0);
  out.lower = kl_divergence(q, qp, base);
  return out;
}

ShotCounts ShotCounts::make(ShotKind kind, int dim, std::vector<std::uint64_t> counts,
                            std::uint64_t seed) {
  if (dim < 2) throw Error(ErrorCode::DimensionTooSmall, "shot counts need d >= 2");
  const std::size_t expected =
      kind == ShotKind::direct_B ? static_cast<std::size_t>(dim)
                                 : static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
  if (counts.size() != expected) {
    throw Error(ErrorCode::DimensionMismatch, "shot count vector has the wrong length");
  }
  ShotCounts s;
  s.kind = kind;
  s.dim = dim;
  s.counts = std::move(counts);
  s.seed = seed;
  for (const auto n : s.counts) s.total += n;
  return s;
}

namespace {

std::vector<std::uint64_t> multinomial(const RVectord& probs, std::uint64_t n, Rng& rng) {
  std::vector<double> cdf(static_cast<std::size_t>(probs.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  for (auto& x : cdf) x /= acc;
  std::vector<std::uint64_t> counts(cdf.size(), 0);
  for (std::uint64_t s = 0; s < n; ++s) {
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    // u < 1 = cdf.back() up to rounding; clamp to the last outcome with mass.
    std::size_t idx = it == cdf.end() ? cdf.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
    while (probs[static_cast<Eigen::Index>(idx)] <= 0.0 && idx > 0) --idx;
    ++counts[idx];
  }
  return counts;
}

}  // namespace

ShotCounts simulate_shots(const DensityMatrixd& rho, const OrthonormalBasisd* a,
                          const OrthonormalBasisd& b, std::uint64_t n, std::uint64_t seed) {
  detail::require_same_dim(rho.dim(), b.dim(), "simulate_shots");
  const int d = static_cast<int>(rho.dim());
  Rng rng(seed);
  if (a == nullptr) {
    return ShotCounts::make(ShotKind::direct_B, d,
                            multinomial(outcome_dist(rho, b).probs(), n, rng), seed);
  }
  detail::require_same_dim(rho.dim(), a->dim(), "simulate_shots");
  const ProbDistd p = outcome_dist(rho, *a);
  const OverlapMatrixd c = overlap_matrix(*a, b);
  RVectord joint(static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) joint[i * d + j] = p[i] * c(i, j);
  }
  return ShotCounts::make(ShotKind::sequential_AB, d, multinomial(joint, n, rng), seed);
}

namespace {

ProbDistd smoothed(const RVectord& counts, double smoothing) {
  RVectord v = counts.array() + smoothing;
  const double total = v.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::EmptyCounts, "no counts to normalize");
  return ProbDistd::from_probs(v / total);
}

}  // namespace

CoherenceEstimate estimate_coherence(const ShotCounts& direct, const ShotCounts& sequential,
                                     double smoothing, LogBase base) {
  if (direct.kind != ShotKind::direct_B || sequential.kind != ShotKind::sequential_AB) {
    throw Error(ErrorCode::KindMismatch,
                "estimate_coherence expects direct_B and sequential_AB counts");
  }
  if (direct.dim != sequential.dim) {
    throw Error(ErrorCode::DimensionMismatch, "shot counts have different dimensions");
  }
  if (direct.total == 0 || sequential.total == 0) {
    throw Error(ErrorCode::EmptyCounts, "shot counts are empty");
  }
  if (!(smoothing >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "smoothing must be >= 0");
  }
  const int d = direct.dim;
  RVectord q(d);
  RVectord row(d);
  RVectord col(d);
  row.setZero();
  col.setZero();
  for (int i = 0; i < d; ++i) q[i] = static_cast<double>(direct.counts[i]);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double n = static_cast<double>(sequential.counts[static_cast<std::size_t>(i * d + j)]);
      row[i] += n;
      col[j] += n;
    }
  }
  const ProbDistd q_hat = smoothed(q, smoothing);
  const ProbDistd p_hat = smoothed(row, smoothing);
  const ProbDistd qp_hat = smoothed(col, smoothing);
  CoherenceEstimate out;
  out.lower = kl_divergence(q_hat, qp_hat, base);
  out.lower_unbounded = std::isinf(out.lower);
  out.upper = shannon_entropy(p_hat, base);
  return out;
}

}  // namespace deur
