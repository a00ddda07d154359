#include "deur/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace deur::io {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("invalid JSON: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::complex<double> parse_complex(const json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    parse_fail(field + ": expected [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

int parse_dim(const json& j) {
  if (!j.is_object()) parse_fail("top level: expected an object");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) {
    parse_fail("dim: expected an integer");
  }
  const int d = j["dim"].get<int>();
  if (d < 2) parse_fail("dim: must be >= 2");
  return d;
}

// Reads a d x d array of [re, im] pairs; element (r, c) of the array lands
// at matrix(r, c), or matrix(c, r) when `transpose`.
CMatrixd parse_square(const json& j, const std::string& name, int d, bool transpose) {
  if (!j.contains(name) || !j[name].is_array()) parse_fail(name + ": expected an array");
  const json& rows = j[name];
  if (static_cast<int>(rows.size()) != d) {
    parse_fail(name + ": expected " + std::to_string(d) + " entries, got " +
               std::to_string(rows.size()));
  }
  CMatrixd m(d, d);
  for (int r = 0; r < d; ++r) {
    const std::string rfield = name + "[" + std::to_string(r) + "]";
    if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != d) {
      parse_fail(rfield + ": expected " + std::to_string(d) + " entries");
    }
    for (int c = 0; c < d; ++c) {
      const auto z = parse_complex(rows[r][c], rfield + "[" + std::to_string(c) + "]");
      if (transpose) {
        m(c, r) = z;
      } else {
        m(r, c) = z;
      }
    }
  }
  return m;
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

// Numeric and boolean cells become JSON numbers/booleans and empty cells
// null; everything else stays a string.
json cell_json(const std::string& cell) {
  if (cell.empty()) return nullptr;
  if (cell == "true") return true;
  if (cell == "false") return false;
  if (cell.find_first_not_of("0123456789") == std::string::npos && cell.size() < 20) {
    return std::stoull(cell);
  }
  if (cell.find_first_not_of("0123456789+-.eE") == std::string::npos) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() + cell.size() && std::isfinite(v)) return v;
  }
  return cell;
}

}  // namespace

DensityMatrixd parse_state(std::string_view text) {
  const json j = parse_text(text);
  const int d = parse_dim(j);
  const CMatrixd m = parse_square(j, "rho", d, false);
  try {
    return DensityMatrixd::from_matrix(m);
  } catch (const Error& e) {
    throw Error(e.code(), std::string("rho: ") + e.what());
  }
}

DensityMatrixd read_state(const std::string& path) {
  try {
    return parse_state(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

json state_to_json(const DensityMatrixd& rho) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < rho.dim(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < rho.dim(); ++c) row.push_back(complex_json(rho.matrix()(r, c)));
    rows.push_back(row);
  }
  return {{"dim", rho.dim()}, {"rho", rows}};
}

OrthonormalBasisd parse_basis(std::string_view text) {
  const json j = parse_text(text);
  const int d = parse_dim(j);
  const CMatrixd m = parse_square(j, "columns", d, true);
  try {
    return OrthonormalBasisd::from_columns(m);
  } catch (const Error& e) {
    throw Error(e.code(), std::string("columns: ") + e.what());
  }
}

OrthonormalBasisd read_basis(const std::string& path) {
  try {
    return parse_basis(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

json basis_to_json(const OrthonormalBasisd& basis) {
  json cols = json::array();
  for (Eigen::Index k = 0; k < basis.dim(); ++k) {
    json ket = json::array();
    for (Eigen::Index r = 0; r < basis.dim(); ++r) ket.push_back(complex_json(basis.columns()(r, k)));
    cols.push_back(ket);
  }
  return {{"dim", basis.dim()}, {"columns", cols}};
}

json to_json(const DivergenceSpec& spec) {
  json j = {{"kind", std::string(to_string(spec.kind()))}};
  if (spec.alpha()) j["alpha"] = *spec.alpha();
  return j;
}

DivergenceSpec divergence_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    parse_fail("kind: expected a string");
  }
  const auto kind = divergence_kind_from_string(j["kind"].get<std::string>());
  if (!kind) parse_fail("kind: unknown divergence '" + j["kind"].get<std::string>() + "'");
  std::optional<double> alpha;
  if (j.contains("alpha")) {
    if (!j["alpha"].is_number()) parse_fail("alpha: expected a number");
    alpha = j["alpha"].get<double>();
  }
  return DivergenceSpec::make(*kind, alpha);
}

json to_json(const RelationId& rel) {
  json j = {{"id", std::string(to_string(rel.kind()))},
            {"variant", std::string(to_string(rel.variant()))}};
  if (rel.alpha()) j["alpha"] = *rel.alpha();
  if (rel.beta()) j["beta"] = *rel.beta();
  return j;
}

RelationId relation_from_json(const json& j) {
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
    parse_fail("id: expected a string");
  }
  const auto kind = relation_kind_from_string(j["id"].get<std::string>());
  if (!kind) parse_fail("id: unknown relation '" + j["id"].get<std::string>() + "'");
  Variant variant = Variant::canonical;
  if (j.contains("variant")) {
    if (!j["variant"].is_string()) parse_fail("variant: expected a string");
    const auto v = variant_from_string(j["variant"].get<std::string>());
    if (!v) parse_fail("variant: expected 'canonical' or 'printed'");
    variant = *v;
  }
  auto number = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_number()) parse_fail(std::string(key) + ": expected a number");
    return j[key].get<double>();
  };
  return RelationId::make(*kind, variant, number("alpha"), number("beta"));
}

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw Error(ErrorCode::InvalidArgument, "table row width differs from header");
  }
  rows_.push_back(std::move(row));
}

void Table::write_csv(std::ostream& os) const {
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      const std::string& c = cells[i];
      if (c.find_first_of(",\"\n") != std::string::npos) {
        os << '"';
        for (char ch : c) {
          if (ch == '"') os << '"';
          os << ch;
        }
        os << '"';
      } else {
        os << c;
      }
    }
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

void Table::write_json(std::ostream& os) const {
  json arr = json::array();
  for (const auto& r : rows_) {
    json obj = json::object();
    for (std::size_t i = 0; i < header_.size(); ++i) obj[header_[i]] = cell_json(r[i]);
    arr.push_back(obj);
  }
  os << arr.dump(2) << '\n';
}

}  // namespace deur::io
