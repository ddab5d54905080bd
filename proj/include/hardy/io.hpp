#pragma once

// File formats:
//   symbol     JSON {"n", "p", "coefficients": [{"k", "re", "im"}], "tail_bound"}
//   operator   one JSON header line {"n", "p", "caps", "structure", "encoding"} followed by the
//              row-major matrix, either binary little-endian float64 (re, im) pairs or CSV rows
//   model      one JSON header line {"theta", "caps", "p", "q", "rows", "cols"} followed by the
//              basis in the binary operator encoding
// Reports are JSON objects built from the analysis result types.

#include "hardy/analysis.hpp"
#include "hardy/modelspace.hpp"
#include "hardy/operators.hpp"
#include "hardy/symbols.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace hardy::io {

using nlohmann::json;

/// Malformed input; the message names the offending field.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Encoding { binary, csv };

json to_json(const MultiIndex& k);
json to_json(const Box& b);
json to_json(const Symbol& sym);
Symbol symbol_from_json(const json& j);

Symbol read_symbol(const std::filesystem::path& path);
void write_symbol(const std::filesystem::path& path, const Symbol& sym);

void write_operator(const std::filesystem::path& path, const Operator& op, Encoding encoding = Encoding::binary);
Operator read_operator(const std::filesystem::path& path);

/// A bare q x q (or any rectangular) matrix in the operator encoding, header {"rows","cols"}.
void write_matrix(const std::filesystem::path& path, const MatrixX<Complex>& m, Encoding encoding = Encoding::binary);
MatrixX<Complex> read_matrix(const std::filesystem::path& path);

void write_model_space(const std::filesystem::path& path, const ModelSpace<Complex>& ms);
/// Header and basis of an exported model space.
std::pair<json, MatrixX<Complex>> read_model_space(const std::filesystem::path& path);

json to_json(const DefectReport<double>& r);
json to_json(const RecoveredSymbol<Complex>& r);
json to_json(const AsymptoticSequence<Complex>& s);
json to_json(const CompactnessProfile<double>& p);
json to_json(const DecompositionResult<Complex>& r);
json to_json(const InnerCertificate<double>& c);
json to_json(const InvertibilityReport<double>& r);
json to_json(const InvarianceKernel<double>& k);
json to_json(const ModelCompactness<double>& m);

}  // namespace hardy::io
