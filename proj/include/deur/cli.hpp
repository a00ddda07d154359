#ifndef DEUR_CLI_HPP
#define DEUR_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "deur/core.hpp"

namespace deur::cli {

enum class Command { verify, dpi, search, volume, table2, region, coherence, shots };
enum class Format { csv, json };

struct RunConfig {
  Command command = Command::verify;
  int dim = 2;
  std::string relation;
  std::string variant = "canonical";
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::string> divergence;  // dpi only; all six when absent
  std::uint64_t samples = 0;              // 0 = command default
  std::uint64_t seed = 1;
  int resolution = 101;
  double c00 = 0.5;
  std::optional<std::string> state_path;
  std::optional<std::string> basis_a_path;
  std::optional<std::string> basis_b_path;
  std::uint64_t shots = 0;
  double smoothing = 0.5;
  unsigned workers = 1;
  LogBase log_base = LogBase::two;
  Format format = Format::csv;
  std::optional<std::string> output_path;
  std::optional<std::string> report_path;  // table2 reference comparison
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInputError = 2;

/// Runs one command. The report goes to `out` (or the output file); a
/// single-line diagnostic prefixed "error:" goes to `err` on failure.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv into a RunConfig and runs it.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace deur::cli

#endif  // DEUR_CLI_HPP
