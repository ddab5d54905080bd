#include "hardy/io.hpp"
#include "hardy/random.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace hardy;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("hardy_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

}  // namespace

TEST_CASE("symbol JSON round trip") {
  TempDir dir;
  std::mt19937_64 rng(1);
  for (int p : {1, 2}) {
    const Symbol raw = random_trig_polynomial<Complex>(2, p, -2, 2, rng);
    const Symbol sym(2, p, raw.coefficients(), 0.25);
    io::write_symbol(dir / "s.json", sym);
    const Symbol back = io::read_symbol(dir / "s.json");
    CHECK(back.dimension() == 2);
    CHECK(back.block_size() == p);
    CHECK(back.tail_bound() == 0.25);
    REQUIRE(back.coefficients().size() == sym.coefficients().size());
    for (const auto& [k, c] : sym.coefficients()) CHECK(back.coefficient(k) == c);
  }
}

TEST_CASE("operator round trip in both encodings") {
  TempDir dir;
  std::mt19937_64 rng(2);
  const Symbol sym = random_trig_polynomial<Complex>(2, 2, -1, 1, rng);
  const Operator t = toeplitz(sym, Box{3, 2});
  for (auto enc : {io::Encoding::binary, io::Encoding::csv}) {
    io::write_operator(dir / "t.op", t, enc);
    const Operator back = io::read_operator(dir / "t.op");
    CHECK(back.box() == t.box());
    CHECK(back.block_size() == 2);
    CHECK(back.matrix() == t.matrix());
    CHECK(back.structure().kind == StructureKind::toeplitz);
    REQUIRE(back.structure().symbol);
    CHECK(back.structure().symbol->coefficients().size() == sym.coefficients().size());
  }
  const Operator s = shift<Complex>(Box{2, 2}, 1);
  io::write_operator(dir / "s.op", s);
  const Operator sb = io::read_operator(dir / "s.op");
  CHECK(sb.structure().kind == StructureKind::shift);
  CHECK(sb.structure().direction == 1);
  CHECK(sb.matrix() == s.matrix());
}

TEST_CASE("matrix and model space export") {
  TempDir dir;
  std::mt19937_64 rng(3);
  const MatrixX<Complex> m = random_matrix<Complex>(3, 5, rng);
  io::write_matrix(dir / "m.bin", m);
  CHECK(io::read_matrix(dir / "m.bin") == m);
  io::write_matrix(dir / "m.csv", m, io::Encoding::csv);
  CHECK(io::read_matrix(dir / "m.csv") == m);

  const auto ms = model_basis(monomial<Complex>(MultiIndex{1, 1}), Box{3, 3});
  io::write_model_space(dir / "ms.bin", ms);
  const auto [header, basis] = io::read_model_space(dir / "ms.bin");
  CHECK(header.at("q").get<long>() == 7);
  CHECK(header.at("safe_caps") == io::json({2, 2}));
  CHECK(basis == ms.basis);
}

TEST_CASE("malformed input raises InputError") {
  TempDir dir;
  CHECK_THROWS_AS(io::read_symbol(dir / "missing.json"), io::InputError);
  write_text(dir / "bad.json", "{not json");
  CHECK_THROWS_AS(io::read_symbol(dir / "bad.json"), io::InputError);
  write_text(dir / "noN.json", R"({"p": 1, "coefficients": []})");
  CHECK_THROWS_WITH_AS(io::read_symbol(dir / "noN.json"), doctest::Contains("n"), io::InputError);
  write_text(dir / "badk.json", R"({"n": 2, "p": 1, "coefficients": [{"k": [1], "re": 1, "im": 0}]})");
  CHECK_THROWS_AS(io::read_symbol(dir / "badk.json"), io::InputError);

  write_text(dir / "trunc.op", "{\"n\":1,\"p\":1,\"caps\":[3],\"encoding\":\"binary\",\"structure\":{\"kind\":\"general\"}}\n1234");
  CHECK_THROWS_AS(io::read_operator(dir / "trunc.op"), io::InputError);
  write_text(dir / "caps.op", "{\"n\":2,\"p\":1,\"caps\":[3],\"encoding\":\"csv\",\"structure\":{\"kind\":\"general\"}}\n");
  CHECK_THROWS_AS(io::read_operator(dir / "caps.op"), io::InputError);
  write_text(dir / "csv.op", "{\"n\":1,\"p\":1,\"caps\":[0],\"encoding\":\"csv\",\"structure\":{\"kind\":\"general\"}}\n1,x\n");
  CHECK_THROWS_AS(io::read_operator(dir / "csv.op"), io::InputError);
}

TEST_CASE("reports serialize to JSON") {
  const Operator t = toeplitz(monomial<Complex>(MultiIndex{1}), Box{6});
  const auto res = asymptotic_decompose(t);
  const io::json j = io::to_json(res);
  CHECK(j.at("verdict").get<bool>());
  CHECK(j.contains("remainder_profile"));
  CHECK(j.contains("sequences"));
  const io::json d = io::to_json(toeplitz_defect(t));
  CHECK(d.at("is_toeplitz").get<bool>());
}
