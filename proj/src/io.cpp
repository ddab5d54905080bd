#include "hardy/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace hardy::io {

namespace {

template <typename T>
T field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw InputError(std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("field '") + name + "' has the wrong type");
  }
}

json real_rows(const MatrixX<Complex>& m, bool imag) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(imag ? m(r, c).imag() : m(r, c).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_doubles(std::ostream& os, const MatrixX<Complex>& m) {
  auto put = [&](double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char buf[8];
    std::memcpy(buf, &bits, 8);
    os.write(buf, 8);
  };
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put(m(r, c).real());
      put(m(r, c).imag());
    }
}

MatrixX<Complex> read_doubles(std::istream& is, long rows, long cols) {
  MatrixX<Complex> m(rows, cols);
  auto get = [&]() {
    char buf[8];
    if (!is.read(buf, 8)) throw InputError("matrix payload is truncated");
    std::uint64_t bits;
    std::memcpy(&bits, buf, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    return std::bit_cast<double>(bits);
  };
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) {
      const double re = get();
      const double im = get();
      m(r, c) = Complex(re, im);
    }
  return m;
}

void write_csv(std::ostream& os, const MatrixX<Complex>& m) {
  os << std::setprecision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << (c ? "," : "") << m(r, c).real() << ',' << m(r, c).imag();
    os << '\n';
  }
}

MatrixX<Complex> read_csv(std::istream& is, long rows, long cols) {
  MatrixX<Complex> m(rows, cols);
  std::string line;
  for (long r = 0; r < rows; ++r) {
    if (!std::getline(is, line)) throw InputError("matrix payload is truncated at row " + std::to_string(r));
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InputError("matrix row " + std::to_string(r) + " holds a non-numeric entry");
      }
    }
    if (static_cast<long>(vals.size()) != 2 * cols) throw InputError("matrix row " + std::to_string(r) + " has the wrong width");
    for (long c = 0; c < cols; ++c) m(r, c) = Complex(vals[2 * c], vals[2 * c + 1]);
  }
  return m;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

json read_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("missing header line");
  try {
    return json::parse(line);
  } catch (const json::exception&) {
    throw InputError("header line is not valid JSON");
  }
}

Encoding encoding_of(const json& header) {
  const auto enc = header.contains("encoding") ? field<std::string>(header, "encoding") : std::string("binary");
  if (enc == "binary") return Encoding::binary;
  if (enc == "csv") return Encoding::csv;
  throw InputError("field 'encoding' must be binary or csv");
}

MatrixX<Complex> read_payload(std::istream& in, Encoding enc, long rows, long cols) {
  return enc == Encoding::binary ? read_doubles(in, rows, cols) : read_csv(in, rows, cols);
}

void write_payload(std::ostream& out, Encoding enc, const MatrixX<Complex>& m) {
  if (enc == Encoding::binary)
    write_doubles(out, m);
  else
    write_csv(out, m);
}

}  // namespace

json to_json(const MultiIndex& k) { return json(k.entries()); }
json to_json(const Box& b) { return json(b.caps()); }

json to_json(const Symbol& sym) {
  json coeffs = json::array();
  for (const auto& [k, c] : sym.coefficients())
    coeffs.push_back({{"k", to_json(k)}, {"re", real_rows(c, false)}, {"im", real_rows(c, true)}});
  return {{"n", sym.dimension()}, {"p", sym.block_size()}, {"coefficients", coeffs}, {"tail_bound", sym.tail_bound()}};
}

Symbol symbol_from_json(const json& j) {
  const int n = field<int>(j, "n");
  const int p = field<int>(j, "p");
  if (n < 1) throw InputError("field 'n' must be at least 1");
  if (p < 1) throw InputError("field 'p' must be at least 1");
  const double tail = j.contains("tail_bound") ? field<double>(j, "tail_bound") : 0.0;
  if (!(tail >= 0)) throw InputError("field 'tail_bound' must be nonnegative");
  const json coeffs = field<json>(j, "coefficients");
  if (!coeffs.is_array()) throw InputError("field 'coefficients' must be an array");
  std::vector<std::pair<MultiIndex, MatrixX<Complex>>> entries;
  for (std::size_t e = 0; e < coeffs.size(); ++e) {
    const json& c = coeffs[e];
    const std::string where = "coefficients[" + std::to_string(e) + "]";
    const auto k = field<std::vector<int>>(c, "k");
    if (static_cast<int>(k.size()) != n) throw InputError("field '" + where + ".k' has length " + std::to_string(k.size()) + ", expected n");
    const auto re = field<std::vector<std::vector<double>>>(c, "re");
    const auto im = c.contains("im") ? field<std::vector<std::vector<double>>>(c, "im")
                                     : std::vector<std::vector<double>>(re.size(), std::vector<double>(re.empty() ? 0 : re[0].size(), 0.0));
    if (static_cast<int>(re.size()) != p || static_cast<int>(im.size()) != p)
      throw InputError("field '" + where + ".re/im' must have p rows");
    MatrixX<Complex> m(p, p);
    for (int a = 0; a < p; ++a) {
      if (static_cast<int>(re[a].size()) != p || static_cast<int>(im[a].size()) != p)
        throw InputError("field '" + where + ".re/im' must have p columns");
      for (int b = 0; b < p; ++b) m(a, b) = Complex(re[a][b], im[a][b]);
    }
    entries.emplace_back(MultiIndex(k), std::move(m));
  }
  try {
    auto sym = from_coefficients<Complex>(n, p, entries);
    return Symbol(n, p, sym.coefficients(), tail);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("field 'coefficients': ") + e.what());
  }
}

Symbol read_symbol(const std::filesystem::path& path) {
  auto in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception&) {
    throw InputError("'" + path.string() + "' is not valid JSON");
  }
  return symbol_from_json(j);
}

void write_symbol(const std::filesystem::path& path, const Symbol& sym) {
  auto out = open_out(path);
  out << to_json(sym).dump(2) << '\n';
}

void write_operator(const std::filesystem::path& path, const Operator& op, Encoding encoding) {
  json structure = {{"kind", to_string(op.structure().kind)}};
  if (op.structure().symbol) structure["symbol"] = to_json(*op.structure().symbol);
  if (op.structure().kind == StructureKind::shift) structure["direction"] = op.structure().direction;
  json header = {{"n", op.dimension()},
                 {"p", op.block_size()},
                 {"caps", to_json(op.box())},
                 {"structure", structure},
                 {"encoding", encoding == Encoding::binary ? "binary" : "csv"}};
  auto out = open_out(path);
  out << header.dump() << '\n';
  write_payload(out, encoding, op.matrix());
}

Operator read_operator(const std::filesystem::path& path) {
  auto in = open_in(path);
  const json header = read_header(in);
  const int n = field<int>(header, "n");
  const int p = field<int>(header, "p");
  const auto caps = field<std::vector<int>>(header, "caps");
  if (static_cast<int>(caps.size()) != n) throw InputError("field 'caps' must have n entries");
  if (p < 1) throw InputError("field 'p' must be at least 1");
  Box box;
  try {
    box = Box(caps);
  } catch (const std::invalid_argument&) {
    throw InputError("field 'caps' must be nonnegative");
  }
  Structure<Complex> structure;
  if (header.contains("structure")) {
    const json& s = header.at("structure");
    const std::string kind = s.is_string() ? s.get<std::string>() : field<std::string>(s, "kind");
    if (kind == "toeplitz" || kind == "shift") {
      structure.kind = kind == "toeplitz" ? StructureKind::toeplitz : StructureKind::shift;
      structure.symbol = std::make_shared<const Symbol>(symbol_from_json(field<json>(s, "symbol")));
      if (kind == "shift") structure.direction = field<int>(s, "direction");
    } else if (kind == "projector") {
      structure.kind = StructureKind::projector;
    } else if (kind != "general") {
      throw InputError("field 'structure' has unknown kind '" + kind + "'");
    }
  }
  const long dim = box.size() * p;
  MatrixX<Complex> m = read_payload(in, encoding_of(header), dim, dim);
  try {
    return Operator(box, p, std::move(m), std::move(structure));
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("field 'structure': ") + e.what());
  }
}

void write_matrix(const std::filesystem::path& path, const MatrixX<Complex>& m, Encoding encoding) {
  json header = {{"rows", m.rows()}, {"cols", m.cols()}, {"encoding", encoding == Encoding::binary ? "binary" : "csv"}};
  auto out = open_out(path);
  out << header.dump() << '\n';
  write_payload(out, encoding, m);
}

MatrixX<Complex> read_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  const json header = read_header(in);
  long rows, cols;
  if (header.contains("rows")) {
    rows = field<long>(header, "rows");
    cols = field<long>(header, "cols");
  } else {
    // An operator file also serves as a matrix.
    const auto caps = field<std::vector<int>>(header, "caps");
    long N = 1;
    for (int c : caps) N *= c + 1;
    rows = cols = N * field<int>(header, "p");
  }
  if (rows < 0 || cols < 0) throw InputError("field 'rows'/'cols' must be nonnegative");
  return read_payload(in, encoding_of(header), rows, cols);
}

void write_model_space(const std::filesystem::path& path, const ModelSpace<Complex>& ms) {
  json header = {{"theta", to_json(ms.theta)},
                 {"caps", to_json(ms.box)},
                 {"safe_caps", to_json(ms.safe_box)},
                 {"p", ms.block_size()},
                 {"q", ms.q()},
                 {"rows", ms.basis.rows()},
                 {"cols", ms.basis.cols()},
                 {"boundary_note", ms.boundary_note},
                 {"encoding", "binary"}};
  auto out = open_out(path);
  out << header.dump() << '\n';
  write_doubles(out, ms.basis);
}

std::pair<json, MatrixX<Complex>> read_model_space(const std::filesystem::path& path) {
  auto in = open_in(path);
  json header = read_header(in);
  const long rows = field<long>(header, "rows");
  const long cols = field<long>(header, "cols");
  MatrixX<Complex> basis = read_doubles(in, rows, cols);
  return {std::move(header), std::move(basis)};
}

json to_json(const DefectReport<double>& r) {
  json j = {{"per_direction", r.per_direction}, {"overall", r.overall}, {"tolerance", r.tolerance}, {"is_toeplitz", r.is_toeplitz}};
  if (r.witness) {
    const auto& w = *r.witness;
    const MultiIndex e = MultiIndex::unit(w.row.size(), w.direction);
    j["witness"] = {{"direction", w.direction},
                    {"entry", {{"row", to_json(w.row)}, {"col", to_json(w.col)}}},
                    {"shifted_entry", {{"row", to_json(w.row + e)}, {"col", to_json(w.col + e)}}}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

json to_json(const RecoveredSymbol<Complex>& r) {
  json dev = json::array();
  for (const auto& [k, v] : r.deviation)
    if (v > 0) dev.push_back({{"k", to_json(k)}, {"spread", v}});
  return {{"symbol", to_json(r.symbol)}, {"max_deviation", r.max_deviation}, {"nonzero_deviations", dev}};
}

json to_json(const AsymptoticSequence<Complex>& s) {
  return {{"direction", s.direction}, {"step_norms", s.step_norms}, {"tolerance", s.tolerance}, {"cauchy", s.cauchy}};
}

json to_json(const CompactnessProfile<double>& p) {
  return {{"c", p.values}, {"m_max", p.m_max}, {"tolerance", p.tolerance}, {"numerically_compact", p.numerically_compact}};
}

json to_json(const DecompositionResult<Complex>& r) {
  json seqs = json::array();
  for (const auto& s : r.sequences) seqs.push_back({{"direction", s.direction}, {"step_norms", s.step_norms}, {"cauchy", s.cauchy}});
  json cross = json::array();
  for (const auto& c : r.cross_terms) cross.push_back({{"i", c.i}, {"j", c.j}, {"norms", c.norms}});
  json j = {{"verdict", r.verdict},
            {"tolerance", r.tolerance},
            {"m_max", r.m_max},
            {"depth", r.depth},
            {"recovered", to_json(r.recovered)},
            {"toeplitz_part_defect", to_json(r.toeplitz_part_defect)},
            {"remainder_norm", spectral_norm(r.remainder.matrix())},
            {"remainder_profile", to_json(r.remainder_profile)},
            {"sequences", seqs},
            {"cross_terms", cross}};
  if (r.failing_direction)
    j["witness"] = {{"direction", *r.failing_direction}, {"step_norm", r.witness_step_norm}};
  else
    j["witness"] = nullptr;
  return j;
}

json to_json(const InnerCertificate<double>& c) {
  return {{"grid", c.grid}, {"max_deviation", c.max_deviation}, {"tolerance", c.tolerance}, {"tail_allowance", c.tail_allowance}, {"passed", c.passed}};
}

json to_json(const InvertibilityReport<double>& r) {
  return {{"grid", r.grid}, {"min_abs_det", r.min_abs_det}, {"threshold", r.threshold}, {"invertible", r.invertible}};
}

json to_json(const InvarianceKernel<double>& k) {
  return {{"q", k.q}, {"sigma_min", k.sigma_min}, {"kernel_dimension", k.kernel_dimension}, {"tolerance", k.tolerance},
          {"method", k.dense ? "dense-svd" : "power-iteration"}, {"residual", k.residual}};
}

json to_json(const ModelCompactness<double>& m) {
  return {{"norms", m.norms}, {"tolerance", m.tolerance}, {"compact", m.compact}};
}

}  // namespace hardy::io
