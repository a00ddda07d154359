#ifndef DEUR_IO_HPP
#define DEUR_IO_HPP

// JSON state/basis files, spec serialization, and tabular reports.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "deur/divergence.hpp"
#include "deur/qstate.hpp"
#include "deur/relations.hpp"

namespace deur::io {

/// {"dim": d, "rho": [[[re, im], ...], ...]}. Throws Error(ParseError) with
/// the offending field, or the validation error of DensityMatrix.
DensityMatrixd parse_state(std::string_view text);
DensityMatrixd read_state(const std::string& path);
nlohmann::json state_to_json(const DensityMatrixd& rho);

/// {"dim": d, "columns": [[[re, im], ...], ...]}, one entry per ket.
OrthonormalBasisd parse_basis(std::string_view text);
OrthonormalBasisd read_basis(const std::string& path);
nlohmann::json basis_to_json(const OrthonormalBasisd& basis);

/// {"kind": string, "alpha": number?}
nlohmann::json to_json(const DivergenceSpec& spec);
DivergenceSpec divergence_from_json(const nlohmann::json& j);

/// {"id": string, "variant": string, "alpha": number?, "beta": number?}
nlohmann::json to_json(const RelationId& rel);
RelationId relation_from_json(const nlohmann::json& j);

/// Fixed "%.12g" formatting so repeated runs produce identical bytes.
std::string format_number(double x);

/// A header plus rows of preformatted cells, written as CSV or as a JSON
/// array of objects keyed by the header.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  void write_csv(std::ostream& os) const;
  void write_json(std::ostream& os) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace deur::io

#endif  // DEUR_IO_HPP
