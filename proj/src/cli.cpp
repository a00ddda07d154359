#include "deur/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include "deur/divergence.hpp"
#include "deur/experiments.hpp"
#include "deur/io.hpp"
#include "deur/relations.hpp"
#include "deur/sampling.hpp"

namespace deur::cli {

namespace {

using io::format_number;

// Raised for bad flags or files; reported as exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string opt_number(std::optional<double> x) { return x ? format_number(*x) : ""; }

RelationId parse_relation(const RunConfig& cfg) {
  if (cfg.relation.empty()) throw InputError("--relation is required");
  const auto kind = relation_kind_from_string(cfg.relation);
  if (!kind) throw InputError("--relation: unknown relation '" + cfg.relation + "'");
  const auto variant = variant_from_string(cfg.variant);
  if (!variant) throw InputError("--variant: expected 'canonical' or 'printed'");
  try {
    return RelationId::make(*kind, *variant, cfg.alpha, cfg.beta);
  } catch (const Error& e) {
    throw InputError(std::string("--relation: ") + e.what());
  }
}

struct Instance {
  DensityMatrixd rho;
  OrthonormalBasisd a;
  OrthonormalBasisd b;
};

OrthonormalBasisd load_basis(const std::optional<std::string>& path, const char* flag) {
  if (!path) throw InputError(std::string(flag) + " is required");
  try {
    return io::read_basis(*path);
  } catch (const Error& e) {
    throw InputError(std::string(flag) + " " + e.what());
  }
}

DensityMatrixd load_state(const std::optional<std::string>& path) {
  if (!path) throw InputError("--state is required");
  try {
    return io::read_state(*path);
  } catch (const Error& e) {
    throw InputError(std::string("--state ") + e.what());
  }
}

void require_dims(const RunConfig& cfg, Eigen::Index d) {
  if (cfg.dim != 2 && d != cfg.dim) {
    throw InputError("--dim " + std::to_string(cfg.dim) + " disagrees with file dimension " +
                     std::to_string(d));
  }
}

Instance load_or_sample(const RunConfig& cfg) {
  if (cfg.state_path) {
    Instance inst{load_state(cfg.state_path), load_basis(cfg.basis_a_path, "--basis-a"),
                  load_basis(cfg.basis_b_path, "--basis-b")};
    if (inst.a.dim() != inst.rho.dim() || inst.b.dim() != inst.rho.dim()) {
      throw InputError("--basis-a/--basis-b: dimension differs from --state");
    }
    require_dims(cfg, inst.rho.dim());
    return inst;
  }
  if (cfg.dim < 2) throw InputError("--dim must be >= 2");
  Rng rng(cfg.seed);
  DensityMatrixd rho = sample_mixed_state<double>(cfg.dim, rng);
  OrthonormalBasisd a = sample_haar_basis<double>(cfg.dim, rng);
  OrthonormalBasisd b = sample_haar_basis<double>(cfg.dim, rng);
  return {std::move(rho), std::move(a), std::move(b)};
}

std::uint64_t samples_or(const RunConfig& cfg, std::uint64_t fallback) {
  return cfg.samples == 0 ? fallback : cfg.samples;
}

std::string log_base_cell(const RunConfig& cfg) { return std::string(to_string(cfg.log_base)); }

struct Report {
  explicit Report(io::Table t) : table(std::move(t)) {}

  io::Table table;
  int exit_code = kExitOk;
  std::string seed;     // provenance cells used when the table lacks them
  std::string samples;
};

// Appends whichever of (seed, samples, variant, log_base) a table lacks so
// that every row can be reproduced from its own cells.
io::Table with_provenance(const Report& r, const RunConfig& cfg) {
  const auto& header = r.table.header();
  auto has = [&header](const char* name) {
    return std::find(header.begin(), header.end(), name) != header.end();
  };
  std::vector<std::string> extra_names;
  std::vector<std::string> extra_cells;
  auto add = [&](const char* name, std::string cell) {
    if (has(name)) return;
    extra_names.emplace_back(name);
    extra_cells.push_back(std::move(cell));
  };
  add("seed", r.seed);
  add("samples", r.samples);
  add("variant", "");
  add("log_base", log_base_cell(cfg));
  if (extra_names.empty()) return r.table;
  std::vector<std::string> h = header;
  h.insert(h.end(), extra_names.begin(), extra_names.end());
  io::Table out(std::move(h));
  for (auto row : r.table.rows()) {
    row.insert(row.end(), extra_cells.begin(), extra_cells.end());
    out.add_row(std::move(row));
  }
  return out;
}

Report run_verify(const RunConfig& cfg) {
  const RelationId rel = parse_relation(cfg);
  const Instance inst = load_or_sample(cfg);
  const ProbDistd p = outcome_dist(inst.rho, inst.a);
  const ProbDistd q = outcome_dist(inst.rho, inst.b);
  const OverlapMatrixd c = overlap_matrix(inst.a, inst.b);
  const EvalOptions opts{cfg.log_base};
  const auto [fwd, dual] = eval_with_dual(rel, p, q, c, opts);
  Report r{io::Table({"relation", "variant", "alpha", "beta", "direction", "lhs", "rhs",
                      "margin", "satisfied", "seed", "samples", "log_base"})};
  const std::string seed = cfg.state_path ? "" : std::to_string(cfg.seed);
  for (const auto& [dir, v] : {std::pair{"forward", fwd}, std::pair{"dual", dual}}) {
    r.table.add_row({std::string(to_string(rel.kind())), std::string(to_string(rel.variant())),
                     opt_number(rel.alpha()), opt_number(rel.beta()), dir,
                     format_number(v.lhs), format_number(v.rhs), format_number(v.margin),
                     v.satisfied ? "true" : "false", seed, "1", log_base_cell(cfg)});
  }
  r.exit_code = fwd.satisfied && dual.satisfied ? kExitOk : kExitViolation;
  return r;
}

std::vector<DivergenceSpec> dpi_specs(const RunConfig& cfg) {
  if (cfg.divergence) {
    const auto kind = divergence_kind_from_string(*cfg.divergence);
    if (!kind) throw InputError("--divergence: unknown divergence '" + *cfg.divergence + "'");
    try {
      return {DivergenceSpec::make(*kind, cfg.alpha)};
    } catch (const Error& e) {
      throw InputError(std::string("--divergence: ") + e.what());
    }
  }
  return {DivergenceSpec::trace(),        DivergenceSpec::infidelity(),
          DivergenceSpec::renyi(0.5),     DivergenceSpec::renyi(0.75),
          DivergenceSpec::renyi(0.99),    DivergenceSpec::tsallis(0.0),
          DivergenceSpec::tsallis(0.5),   DivergenceSpec::tsallis(0.9),
          DivergenceSpec::relative_entropy(), DivergenceSpec::hilbert_schmidt()};
}

Report run_dpi(const RunConfig& cfg) {
  if (cfg.dim < 2) throw InputError("--dim must be >= 2");
  const auto specs = dpi_specs(cfg);
  const std::uint64_t n = samples_or(cfg, 10000);
  std::vector<double> min_margin(specs.size(), kInfinity);
  std::vector<std::uint64_t> violations(specs.size(), 0);
  Rng rng(cfg.seed);
  for (std::uint64_t i = 0; i < n; ++i) {
    const DensityMatrixd rho = (i % 2 == 0) ? sample_pure_state<double>(cfg.dim, rng)
                                            : sample_mixed_state<double>(cfg.dim, rng);
    const OrthonormalBasisd a = sample_haar_basis<double>(cfg.dim, rng);
    const OrthonormalBasisd b = sample_haar_basis<double>(cfg.dim, rng);
    for (std::size_t s = 0; s < specs.size(); ++s) {
      const double m = dpi_margin(specs[s], rho, a, b, cfg.log_base);
      min_margin[s] = std::min(min_margin[s], m);
      if (m < -1e-8) ++violations[s];
    }
  }
  Report r{io::Table({"divergence", "alpha", "dim", "samples", "seed", "min_margin",
                      "violations", "log_base"})};
  bool any = false;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    any = any || violations[s] > 0;
    r.table.add_row({std::string(to_string(specs[s].kind())), opt_number(specs[s].alpha()),
                     std::to_string(cfg.dim), std::to_string(n), std::to_string(cfg.seed),
                     format_number(min_margin[s]), std::to_string(violations[s]),
                     log_base_cell(cfg)});
  }
  r.exit_code = any ? kExitViolation : kExitOk;
  return r;
}

Report run_search(const RunConfig& cfg) {
  const RelationId rel = parse_relation(cfg);
  if (cfg.dim < 2) throw InputError("--dim must be >= 2");
  const std::uint64_t n = samples_or(cfg, 10000);
  const auto found =
      search_counterexample(rel, cfg.dim, n, cfg.seed, EvalOptions{cfg.log_base}, cfg.workers);
  Report r{io::Table({"relation", "variant", "alpha", "beta", "dim", "samples", "seed",
                      "found", "index", "lhs", "rhs", "margin", "log_base", "instance"})};
  std::vector<std::string> row{std::string(to_string(rel.kind())),
                               std::string(to_string(rel.variant())),
                               opt_number(rel.alpha()),
                               opt_number(rel.beta()),
                               std::to_string(cfg.dim),
                               std::to_string(n),
                               std::to_string(cfg.seed),
                               found ? "true" : "false"};
  if (found) {
    const nlohmann::json instance = {{"state", io::state_to_json(found->rho)},
                                     {"basis_a", io::basis_to_json(found->a)},
                                     {"basis_b", io::basis_to_json(found->b)}};
    row.insert(row.end(), {std::to_string(found->index), format_number(found->verdict.lhs),
                           format_number(found->verdict.rhs),
                           format_number(found->verdict.margin), log_base_cell(cfg),
                           instance.dump()});
  } else {
    row.insert(row.end(), {"", "", "", "", log_base_cell(cfg), ""});
  }
  r.table.add_row(std::move(row));
  r.exit_code = found ? kExitViolation : kExitOk;
  return r;
}

io::Table volume_table() {
  return io::Table({"relation", "variant", "alpha", "dim", "samples", "seed", "volume",
                    "std_error", "log_base"});
}

void add_volume_row(io::Table& t, const VolumeEstimate& e, const RunConfig& cfg) {
  t.add_row({std::string(to_string(e.relation.kind())),
             std::string(to_string(e.relation.variant())), opt_number(e.relation.alpha()),
             std::to_string(e.dim), std::to_string(e.samples), std::to_string(e.seed),
             format_number(e.volume), format_number(e.std_error), log_base_cell(cfg)});
}

VolumeOptions volume_options(const RunConfig& cfg) {
  VolumeOptions o;
  o.eval.base = cfg.log_base;
  o.workers = cfg.workers;
  return o;
}

void check_volume_args(const RunConfig& cfg, std::uint64_t n) {
  if (cfg.dim != 2 && cfg.dim != 3) throw InputError("--dim: volumes support d = 2 or 3");
  if (n < kMinVolumeSamples) throw InputError("--samples: volumes need at least 1000");
}

Report run_volume(const RunConfig& cfg) {
  const RelationId rel = parse_relation(cfg);
  const std::uint64_t n = samples_or(cfg, 1000000);
  check_volume_args(cfg, n);
  Report r{volume_table()};
  add_volume_row(r.table, estimate_volume(rel, cfg.dim, n, cfg.seed, volume_options(cfg)), cfg);
  return r;
}

Report run_table2(const RunConfig& cfg) {
  const std::uint64_t n = samples_or(cfg, 1000000);
  check_volume_args(cfg, n);
  std::vector<RelationId> rels = table2_relations();
  const std::vector<double> reference = reference_volumes(cfg.dim);
  rels.push_back(RelationId::u_ts(0.5, Variant::printed));
  const auto estimates = estimate_volumes(rels, cfg.dim, n, cfg.seed, volume_options(cfg));
  Report r{volume_table()};
  for (const auto& e : estimates) add_volume_row(r.table, e, cfg);
  if (cfg.report_path) {
    const double tol = cfg.dim == 2 ? 0.01 : 0.015;
    io::Table cmp({"relation", "variant", "alpha", "dim", "samples", "seed", "volume",
                   "std_error", "reference", "gap", "within_tolerance", "log_base"});
    for (std::size_t k = 0; k < reference.size(); ++k) {
      const auto& e = estimates[k];
      const double gap = e.volume - reference[k];
      cmp.add_row({std::string(to_string(e.relation.kind())),
                   std::string(to_string(e.relation.variant())), opt_number(e.relation.alpha()),
                   std::to_string(e.dim), std::to_string(e.samples), std::to_string(e.seed),
                   format_number(e.volume), format_number(e.std_error),
                   format_number(reference[k]), format_number(gap),
                   std::abs(gap) <= tol ? "true" : "false", log_base_cell(cfg)});
    }
    std::ofstream f(*cfg.report_path);
    if (!f) throw InputError("--report: cannot write '" + *cfg.report_path + "'");
    cmp.write_csv(f);
  }
  return r;
}

Report run_region(const RunConfig& cfg) {
  const RelationId rel = parse_relation(cfg);
  if (cfg.resolution < 2) throw InputError("--resolution must be >= 2");
  if (!(cfg.c00 >= 0.0 && cfg.c00 <= 1.0)) throw InputError("--c00 must lie in [0, 1]");
  const RegionGrid g = region_grid(rel, cfg.c00, cfg.resolution, EvalOptions{cfg.log_base});
  Report r{io::Table({"relation", "c00", "p0", "q0", "admissible", "variant", "alpha", "beta",
                      "log_base"})};
  for (int i = 0; i < g.resolution; ++i) {
    for (int j = 0; j < g.resolution; ++j) {
      r.table.add_row({std::string(to_string(rel.kind())), format_number(g.c00),
                       format_number(g.p0(i)), format_number(g.q0(j)),
                       g.at(i, j) ? "true" : "false", std::string(to_string(rel.variant())),
                       opt_number(rel.alpha()), opt_number(rel.beta()), log_base_cell(cfg)});
    }
  }
  r.samples = std::to_string(g.cells.size());
  return r;
}

Report run_coherence(const RunConfig& cfg) {
  const DensityMatrixd rho = load_state(cfg.state_path);
  const OrthonormalBasisd a = load_basis(cfg.basis_a_path, "--basis-a");
  const OrthonormalBasisd b = load_basis(cfg.basis_b_path, "--basis-b");
  if (a.dim() != rho.dim() || b.dim() != rho.dim()) {
    throw InputError("--basis-a/--basis-b: dimension differs from --state");
  }
  const CoherenceBounds cb = coherence_bounds(rho, a, b, cfg.log_base);
  std::vector<std::string> header{"upper", "exact", "lower", "base"};
  std::vector<std::string> row{format_number(cb.upper), format_number(cb.exact),
                               format_number(cb.lower), std::string(to_string(cb.base))};
  if (cfg.shots > 0) {
    if (!(cfg.smoothing >= 0.0)) throw InputError("--smoothing must be >= 0");
    const ShotCounts direct =
        simulate_shots(rho, nullptr, b, cfg.shots, Rng::derive_seed(cfg.seed, 0));
    const ShotCounts seq = simulate_shots(rho, &a, b, cfg.shots, Rng::derive_seed(cfg.seed, 1));
    const CoherenceEstimate est = estimate_coherence(direct, seq, cfg.smoothing, cfg.log_base);
    header.insert(header.end(), {"samples", "seed", "smoothing", "lower_estimate",
                                 "upper_estimate", "lower_unbounded"});
    row.insert(row.end(), {std::to_string(cfg.shots), std::to_string(cfg.seed),
                           format_number(cfg.smoothing), format_number(est.lower),
                           format_number(est.upper), est.lower_unbounded ? "true" : "false"});
  }
  Report r{io::Table(header)};
  r.table.add_row(row);
  if (cfg.shots == 0) r.samples = "0";
  return r;
}

Report run_shots(const RunConfig& cfg) {
  const DensityMatrixd rho = load_state(cfg.state_path);
  const OrthonormalBasisd b = load_basis(cfg.basis_b_path, "--basis-b");
  std::optional<OrthonormalBasisd> a;
  if (cfg.basis_a_path) a = load_basis(cfg.basis_a_path, "--basis-a");
  if (b.dim() != rho.dim() || (a && a->dim() != rho.dim())) {
    throw InputError("--basis-a/--basis-b: dimension differs from --state");
  }
  const ShotCounts s = simulate_shots(rho, a ? &*a : nullptr, b, cfg.shots, cfg.seed);
  Report r{io::Table({"kind", "a_outcome", "b_outcome", "count", "samples", "seed"})};
  const std::string kind = s.kind == ShotKind::direct_B ? "direct_B" : "sequential_AB";
  for (std::size_t k = 0; k < s.counts.size(); ++k) {
    const bool seq = s.kind == ShotKind::sequential_AB;
    const std::size_t d = static_cast<std::size_t>(s.dim);
    r.table.add_row({kind, seq ? std::to_string(k / d) : "", std::to_string(seq ? k % d : k),
                     std::to_string(s.counts[k]), std::to_string(s.total),
                     std::to_string(s.seed)});
  }
  return r;
}

Report dispatch(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::verify: return run_verify(cfg);
    case Command::dpi: return run_dpi(cfg);
    case Command::search: return run_search(cfg);
    case Command::volume: return run_volume(cfg);
    case Command::table2: return run_table2(cfg);
    case Command::region: return run_region(cfg);
    case Command::coherence: return run_coherence(cfg);
    case Command::shots: return run_shots(cfg);
  }
  throw InputError("unknown command");
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Report report = dispatch(config);
    std::ofstream file;
    std::ostream* sink = &out;
    if (config.output_path) {
      file.open(*config.output_path);
      if (!file) throw InputError("--output: cannot write '" + *config.output_path + "'");
      sink = &file;
    }
    const io::Table table = with_provenance(report, config);
    if (config.format == Format::json) {
      table.write_json(*sink);
    } else {
      table.write_csv(*sink);
    }
    return report.exit_code;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
  }
  return kExitInputError;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uncertainty-disturbance relation toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string log_base = "2";
  std::string format = "csv";
  app.add_option("--log-base", log_base, "Logarithm base for entropic quantities (2 or e)")
      ->check(CLI::IsMember({"2", "e"}));
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", cfg.output_path, "Write the report to a file");

  auto relation_opts = [&cfg](CLI::App* sub, bool required) {
    auto* o = sub->add_option("--relation", cfg.relation, "Relation id, e.g. U_tr, U_ts, EUR_MU");
    if (required) o->required();
    sub->add_option("--variant", cfg.variant, "canonical or printed");
    sub->add_option("--alpha", cfg.alpha, "Order parameter");
    sub->add_option("--beta", cfg.beta, "Second order (EUR_MU)");
  };
  auto instance_opts = [&cfg](CLI::App* sub) {
    sub->add_option("--state", cfg.state_path, "State JSON file");
    sub->add_option("--basis-a", cfg.basis_a_path, "Basis JSON file for A");
    sub->add_option("--basis-b", cfg.basis_b_path, "Basis JSON file for B");
  };
  auto mc_opts = [&cfg](CLI::App* sub) {
    sub->add_option("--dim", cfg.dim, "Dimension d");
    sub->add_option("--samples", cfg.samples, "Sample count / budget");
    sub->add_option("--seed", cfg.seed, "64-bit seed");
    sub->add_option("--workers", cfg.workers, "Worker threads");
  };

  const std::vector<std::pair<Command, CLI::App*>> subs{
      {Command::verify, app.add_subcommand("verify", "Evaluate a relation and its dual")},
      {Command::dpi, app.add_subcommand("dpi", "Data-processing margins over an ensemble")},
      {Command::search, app.add_subcommand("search", "Counterexample search")},
      {Command::volume, app.add_subcommand("volume", "Feasible-region volume")},
      {Command::table2, app.add_subcommand("table2", "All volume-table rows for one dimension")},
      {Command::region, app.add_subcommand("region", "Qubit admissibility grid")},
      {Command::coherence, app.add_subcommand("coherence", "Coherence bounds")},
      {Command::shots, app.add_subcommand("shots", "Simulated measurement counts")},
  };
  for (const auto& [cmd, sub] : subs) {
    switch (cmd) {
      case Command::verify:
        relation_opts(sub, true);
        instance_opts(sub);
        mc_opts(sub);
        break;
      case Command::dpi:
        mc_opts(sub);
        sub->add_option("--divergence", cfg.divergence, "Divergence kind (default: all)");
        sub->add_option("--alpha", cfg.alpha, "Divergence order");
        break;
      case Command::search:
      case Command::volume:
        relation_opts(sub, true);
        mc_opts(sub);
        break;
      case Command::table2:
        mc_opts(sub);
        sub->add_option("--report", cfg.report_path, "Write the reference comparison CSV");
        break;
      case Command::region:
        relation_opts(sub, true);
        sub->add_option("--c00", cfg.c00, "Overlap c00");
        sub->add_option("--resolution", cfg.resolution, "Grid points per axis");
        break;
      case Command::coherence:
        instance_opts(sub);
        sub->add_option("--shots", cfg.shots, "Simulate this many shots per experiment");
        sub->add_option("--seed", cfg.seed, "64-bit seed");
        sub->add_option("--smoothing", cfg.smoothing, "Pseudo-counts per cell");
        break;
      case Command::shots:
        instance_opts(sub);
        sub->add_option("--shots", cfg.shots, "Number of shots")->required();
        sub->add_option("--seed", cfg.seed, "64-bit seed");
        break;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (auto& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    err << "error: " << msg << '\n';
    return kExitInputError;
  }
  for (const auto& [cmd, sub] : subs) {
    if (sub->parsed()) cfg.command = cmd;
  }
  cfg.log_base = log_base == "e" ? LogBase::e : LogBase::two;
  cfg.format = format == "json" ? Format::json : Format::csv;
  return run(cfg, out, err);
}

}  // namespace deur::cli
