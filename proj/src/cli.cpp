#include "hardy/cli.hpp"

#include "hardy/io.hpp"
#include "hardy/random.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace hardy::cli {

namespace {

using io::json;

struct Options {
  std::string input;
  std::string out;
  std::string format = "json";
  std::string symbol_path;
  std::string theta_path;
  std::string operator_path;
  std::vector<int> caps;
  std::vector<int> grid;
  std::vector<int> monomial;
  std::vector<double> blaschke;
  std::vector<std::string> factors;
  std::vector<std::string> multiply;
  std::string certify;
  int degree = 32;
  int n = 1;
  int p = 1;
  int span = 1;
  int m_max = -1;
  int trials = 20;
  double tol = -1;
  double delta = 1e-8;
  std::uint64_t seed = 1;
  bool random = false;
};


Box parse_box(const std::vector<int>& caps) {
  if (caps.empty()) throw io::InputError("flag '--caps' is required");
  try {
    return Box(caps);
  } catch (const std::invalid_argument&) {
    throw io::InputError("flag '--caps' must list nonnegative integers");
  }
}

double tol_or(const Options& o, double fallback) { return o.tol < 0 ? fallback : o.tol; }

std::optional<int> m_max_of(const Options& o) {
  return o.m_max < 0 ? std::nullopt : std::optional<int>(o.m_max);
}

void emit(const Options& o, const json& report, std::ostream& out) {
  if (!o.out.empty() && o.format == "json") {
    std::ofstream f(o.out);
    if (!f) throw std::runtime_error("cannot write '" + o.out + "'");
    f << report.dump(2) << '\n';
  } else {
    out << report.dump(2) << '\n';
  }
}

void emit_csv(const Options& o, const std::string& csv, std::ostream& out) {
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw std::runtime_error("cannot write '" + o.out + "'");
    f << csv;
  } else {
    out << csv;
  }
}

std::string series_csv(const std::vector<std::pair<std::string, std::vector<double>>>& series) {
  std::ostringstream os;
  os << std::setprecision(17) << "series,m,value\n";
  for (const auto& [name, values] : series)
    for (std::size_t m = 0; m < values.size(); ++m) os << name << ',' << m << ',' << values[m] << '\n';
  return os.str();
}

TorusGrid grid_for(const Options& o, const Symbol& sym) {
  if (o.grid.empty()) return default_grid(sym);
  if (static_cast<int>(o.grid.size()) != sym.dimension()) throw io::InputError("flag '--grid' must have one size per variable");
  for (int g : o.grid)
    if (g < 1) throw io::InputError("flag '--grid' sizes must be positive");
  return TorusGrid{o.grid};
}

Operator load_operator(const std::string& path) {
  if (path.empty()) throw io::InputError("an operator file argument is required");
  return io::read_operator(path);
}

Symbol load_theta(const Options& o) {
  if (o.theta_path.empty()) throw io::InputError("flag '--theta' is required");
  return io::read_symbol(o.theta_path);
}

ModelSpace<Complex> build_model(const Symbol& theta, const Box& box, double tol) {
  if (theta.dimension() != box.dimension()) throw io::InputError("flag '--caps' must match the dimension of theta");
  try {
    return model_basis(theta, box, tol);
  } catch (const std::invalid_argument& e) {
    throw io::InputError(std::string("theta: ") + e.what());
  }
}

json config_of(const std::string& command, const Options& o) {
  json c = {{"command", command}};
  if (!o.input.empty()) c["input"] = o.input;
  if (!o.caps.empty()) c["caps"] = o.caps;
  if (!o.grid.empty()) c["grid"] = o.grid;
  if (o.tol >= 0) c["tol"] = o.tol;
  if (o.m_max >= 0) c["m_max"] = o.m_max;
  c["seed"] = o.seed;
  return c;
}

// ---------------------------------------------------------------------------

int cmd_symbol(const Options& o, std::ostream& out) {
  std::optional<Symbol> sym;
  int modes = 0;
  if (!o.input.empty()) ++modes, sym = io::read_symbol(o.input);
  if (!o.monomial.empty()) ++modes, sym = monomial<Complex>(MultiIndex(o.monomial), o.p);
  if (!o.blaschke.empty()) {
    ++modes;
    if (o.blaschke.size() != 2) throw io::InputError("flag '--blaschke' takes RE,IM");
    try {
      sym = blaschke_factor(Complex(o.blaschke[0], o.blaschke[1]), o.degree);
    } catch (const std::invalid_argument& e) {
      throw io::InputError(std::string("flag '--blaschke': ") + e.what());
    }
  }
  if (o.random) {
    ++modes;
    if (o.n < 1 || o.p < 1 || o.span < 0) throw io::InputError("flags '--n', '--p', '--span' must be positive");
    std::mt19937_64 rng(o.seed);
    sym = random_trig_polynomial<Complex>(o.n, o.p, -o.span, o.span, rng);
  }
  if (!o.factors.empty()) {
    ++modes;
    std::vector<Symbol> fs;
    for (const auto& f : o.factors) fs.push_back(io::read_symbol(f));
    try {
      sym = product_inner(fs);
    } catch (const std::invalid_argument& e) {
      throw io::InputError(std::string("flag '--product-inner': ") + e.what());
    }
  }
  if (!o.multiply.empty()) {
    ++modes;
    if (o.multiply.size() < 2) throw io::InputError("flag '--multiply' needs at least two symbol files");
    Symbol acc = io::read_symbol(o.multiply[0]);
    for (std::size_t i = 1; i < o.multiply.size(); ++i) {
      try {
        acc = multiply(acc, io::read_symbol(o.multiply[i]));
      } catch (const std::invalid_argument& e) {
        throw io::InputError(std::string("flag '--multiply': ") + e.what());
      }
    }
    sym = acc;
  }
  if (modes != 1) throw io::InputError("give exactly one of INPUT, --monomial, --blaschke, --random, --product-inner, --multiply");

  json report = {{"config", config_of("symbol", o)}, {"symbol", io::to_json(*sym)}};
  bool ok = true;
  if (o.certify == "inner") {
    if (!sym->is_analytic()) throw io::InputError("flag '--certify inner' needs an analytic symbol");
    auto cert = is_inner(*sym, grid_for(o, *sym), tol_or(o, kExactTolerance));
    report["inner"] = io::to_json(cert);
    ok = cert.passed;
  } else if (o.certify == "invertible") {
    auto rep = is_invertible_ae(*sym, grid_for(o, *sym), o.delta);
    report["invertible"] = io::to_json(rep);
    ok = rep.invertible;
  } else if (!o.certify.empty()) {
    throw io::InputError("flag '--certify' must be inner or invertible");
  }
  if (!o.out.empty()) {
    io::write_symbol(o.out, *sym);
    report.erase("symbol");
    report["out"] = o.out;
  }
  out << report.dump(2) << '\n';
  return ok ? kExitOk : kExitVerdictFalse;
}

int cmd_toeplitz(const Options& o, std::ostream& out) {
  if (o.symbol_path.empty()) throw io::InputError("flag '--symbol' is required");
  if (o.out.empty()) throw io::InputError("flag '--out' is required");
  const Symbol sym = io::read_symbol(o.symbol_path);
  const Box box = parse_box(o.caps);
  if (sym.dimension() != box.dimension()) throw io::InputError("flag '--caps' must match the symbol dimension");
  io::Encoding enc;
  if (o.format == "csv")
    enc = io::Encoding::csv;
  else if (o.format == "json" || o.format == "binary")
    enc = io::Encoding::binary;
  else
    throw io::InputError("flag '--format' must be binary or csv");
  const Operator t = toeplitz(sym, box);
  io::write_operator(o.out, t, enc);
  out << json{{"config", config_of("toeplitz", o)}, {"out", o.out}, {"size", t.size()}}.dump(2) << '\n';
  return kExitOk;
}

int cmd_check_toeplitz(const Options& o, std::ostream& out) {
  const Operator t = load_operator(o.input);
  const auto rep = toeplitz_defect(t, tol_or(o, kExactTolerance));
  emit(o, {{"config", config_of("check-toeplitz", o)}, {"defect", io::to_json(rep)}}, out);
  return rep.is_toeplitz ? kExitOk : kExitVerdictFalse;
}

int cmd_recover(const Options& o, std::ostream& out) {
  const Operator t = load_operator(o.input);
  const auto rec = recover_symbol(t);
  json report = {{"config", config_of("recover", o)}, {"recovered", io::to_json(rec)}};
  if (!o.out.empty()) {
    io::write_symbol(o.out, rec.symbol);
    report["recovered"].erase("symbol");
    report["out"] = o.out;
  }
  out << report.dump(2) << '\n';
  return kExitOk;
}

int emit_decomposition(const std::string& command, const Options& o, const DecompositionResult<Complex>& res, std::ostream& out) {
  if (o.format == "csv") {
    std::vector<std::pair<std::string, std::vector<double>>> series;
    for (const auto& s : res.sequences) series.emplace_back("step_norm_dir" + std::to_string(s.direction), s.step_norms);
    series.emplace_back("remainder_c", res.remainder_profile.values);
    for (const auto& c : res.cross_terms) series.emplace_back("cross_" + std::to_string(c.i) + "_" + std::to_string(c.j), c.norms);
    emit_csv(o, series_csv(series), out);
  } else {
    emit(o, {{"config", config_of(command, o)}, {"decomposition", io::to_json(res)}}, out);
  }
  return res.verdict ? kExitOk : kExitVerdictFalse;
}

int cmd_decompose(const Options& o, std::ostream& out) {
  const Operator t = load_operator(o.input);
  try {
    return emit_decomposition("decompose", o, asymptotic_decompose(t, tol_or(o, kLimitTolerance), m_max_of(o)), out);
  } catch (const std::invalid_argument& e) {
    throw io::InputError(std::string("flag '--m-max' or operator box: ") + e.what());
  }
}

int cmd_block_decompose(const Options& o, std::ostream& out) {
  const Operator t = load_operator(o.input);
  if (t.dimension() != 1) throw io::InputError("field 'n' must be 1 for block-decompose");
  try {
    return emit_decomposition("block-decompose", o, feintuch_decompose(t, tol_or(o, kLimitTolerance), m_max_of(o)), out);
  } catch (const std::invalid_argument& e) {
    throw io::InputError(std::string("flag '--m-max' or operator box: ") + e.what());
  }
}

int cmd_compactness(const Options& o, std::ostream& out) {
  const Operator t = load_operator(o.input);
  const int m_max = o.m_max < 0 ? t.box().min_cap() + 1 : o.m_max;
  if (m_max > t.box().min_cap() + 1) throw io::InputError("flag '--m-max' exceeds min(caps) + 1");
  const auto prof = compactness_profile(t, m_max, tol_or(o, kLimitTolerance));
  if (o.format == "csv")
    emit_csv(o, series_csv({{"c", prof.values}}), out);
  else
    emit(o, {{"config", config_of("compactness", o)}, {"profile", io::to_json(prof)}}, out);
  return prof.numerically_compact ? kExitOk : kExitVerdictFalse;
}

int cmd_modelspace(const Options& o, std::ostream& out) {
  const Symbol theta = load_theta(o);
  const auto ms = build_model(theta, parse_box(o.caps), tol_or(o, kExactTolerance));
  json report = {{"config", config_of("modelspace", o)},
                 {"q", ms.q()},
                 {"safe_caps", ms.safe_box.caps()},
                 {"boundary_note", ms.boundary_note},
                 {"inner", io::to_json(ms.certificate)}};
  if (!o.out.empty()) {
    io::write_model_space(o.out, ms);
    report["out"] = o.out;
  }
  out << report.dump(2) << '\n';
  return kExitOk;
}

int cmd_invariance(const Options& o, std::ostream& out) {
  const Symbol theta = load_theta(o);
  const auto ms = build_model(theta, parse_box(o.caps), kExactTolerance);
  if (ms.q() < 1) throw io::InputError("theta: the model space is empty at this box");
  const auto ker = invariance_kernel(ms, tol_or(o, 1e-8));
  emit(o, {{"config", config_of("invariance", o)}, {"kernel", io::to_json(ker)}}, out);
  return ker.kernel_dimension == 0 ? kExitOk : kExitVerdictFalse;
}

int cmd_model_compactness(const Options& o, std::ostream& out) {
  const Symbol theta = load_theta(o);
  const auto ms = build_model(theta, parse_box(o.caps), kExactTolerance);
  MatrixX<Complex> t = MatrixX<Complex>::Identity(ms.q(), ms.q());
  if (!o.operator_path.empty()) t = io::read_matrix(o.operator_path);
  if (t.rows() != ms.q() || t.cols() != ms.q()) throw io::InputError("flag '--operator' must hold a q x q matrix, q = " + std::to_string(ms.q()));
  if (o.m_max < 1) throw io::InputError("flag '--m-max' must be at least 1");
  const auto res = model_compactness_test(ms, t, o.m_max, tol_or(o, kLimitTolerance));
  emit(o, {{"config", config_of("model-compactness", o)}, {"q", ms.q()}, {"result", io::to_json(res)}}, out);
  return res.compact ? kExitOk : kExitVerdictFalse;
}

int cmd_bench_matvec(const Options& o, std::ostream& out) {
  const Box box = parse_box(o.caps);
  if (box.size() < 64) throw io::InputError("flag '--caps' gives N = " + std::to_string(box.size()) + ", below the benchmark floor of 64");
  if (o.trials < 1) throw io::InputError("flag '--trials' must be at least 1");
  std::mt19937_64 rng(o.seed);
  const Symbol sym = random_trig_polynomial<Complex>(box.dimension(), o.p, -o.span, o.span, rng);
  const Operator t = toeplitz(sym, box);
  const FastToeplitzApplier<Complex> fast(t);
  using clock = std::chrono::steady_clock;
  std::vector<double> dense_times, fast_times;
  double residual = 0;
  for (int trial = 0; trial < o.trials; ++trial) {
    const VectorX<Complex> v = random_matrix<Complex>(t.size(), 1, rng);
    VectorX<Complex> yd(t.size());
    const auto t0 = clock::now();
    yd.noalias() = t.matrix() * v;
    const auto t1 = clock::now();
    const VectorX<Complex> yf = fast(v);
    const auto t2 = clock::now();
    dense_times.push_back(std::chrono::duration<double>(t1 - t0).count());
    fast_times.push_back(std::chrono::duration<double>(t2 - t1).count());
    residual = std::max(residual, (yf - yd).norm() / std::max(yd.norm(), 1e-300));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  };
  std::ostringstream os;
  os << std::setprecision(17) << "N,p,dense_time,fast_time,max_residual\n"
     << box.size() << ',' << o.p << ',' << median(dense_times) << ',' << median(fast_times) << ',' << residual << '\n';
  emit_csv(o, os.str(), out);
  return residual <= 1e-10 ? kExitOk : kExitVerdictFalse;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toeplitz and asymptotic Toeplitz analysis on truncated Hardy spaces of the polydisc"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output path");
    sub->add_option("--format", o.format, "json|csv (reports) or binary|csv (operators)");
    sub->add_option("--tol", o.tol, "Tolerance");
    sub->add_option("--seed", o.seed, "Random seed");
  };
  auto add_input = [&](CLI::App* sub) { sub->add_option("input", o.input, "Input file"); };
  auto add_caps = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--caps", o.caps, "Degree caps a,b,...")->delimiter(',');
    if (required) opt->required();
  };

  auto* symbol = app.add_subcommand("symbol", "Build a symbol and optionally certify it");
  add_common(symbol);
  add_input(symbol);
  symbol->add_option("--monomial", o.monomial, "Exponents of z^k")->delimiter(',');
  symbol->add_option("--blaschke", o.blaschke, "Zero a = RE,IM of a one-variable Blaschke factor")->delimiter(',');
  symbol->add_option("--degree", o.degree, "Truncation degree for --blaschke");
  symbol->add_flag("--random", o.random, "Random trigonometric polynomial");
  symbol->add_option("--n", o.n, "Number of variables for --random");
  symbol->add_option("--p", o.p, "Block size");
  symbol->add_option("--span", o.span, "Frequencies in [-span, span] for --random");
  symbol->add_option("--product-inner", o.factors, "One-variable factors f1.json,f2.json,...")->delimiter(',');
  symbol->add_option("--multiply", o.multiply, "Symbols to multiply a.json,b.json,...")->delimiter(',');
  symbol->add_option("--certify", o.certify, "inner|invertible");
  symbol->add_option("--grid", o.grid, "Grid sizes g1,g2,...")->delimiter(',');
  symbol->add_option("--delta", o.delta, "Determinant threshold for --certify invertible");

  auto* toep = app.add_subcommand("toeplitz", "Finite section of a Toeplitz operator");
  add_common(toep);
  toep->add_option("--symbol", o.symbol_path, "Symbol JSON")->required();
  add_caps(toep, true);

  auto* check = app.add_subcommand("check-toeplitz", "Shift-invariance defect");
  add_common(check);
  add_input(check);

  auto* recover = app.add_subcommand("recover", "Recover the symbol by diagonal averaging");
  add_common(recover);
  add_input(recover);

  auto* decomp = app.add_subcommand("decompose", "Toeplitz + compact decomposition");
  add_common(decomp);
  add_input(decomp);
  decomp->add_option("--m-max", o.m_max, "Deepest shift");

  auto* compact = app.add_subcommand("compactness", "Layer-projector compactness profile");
  add_common(compact);
  add_input(compact);
  compact->add_option("--m-max", o.m_max, "Largest layer index");

  auto* model = app.add_subcommand("modelspace", "Basis of the truncated quotient space");
  add_common(model);
  model->add_option("--theta", o.theta_path, "Inner symbol JSON")->required();
  add_caps(model, true);

  auto* inv = app.add_subcommand("invariance", "Kernel of A -> A - C^* A C");
  add_common(inv);
  inv->add_option("--theta", o.theta_path, "Inner symbol JSON")->required();
  add_caps(inv, true);

  auto* mcomp = app.add_subcommand("model-compactness", "Decay of C^{*m} T C^m");
  add_common(mcomp);
  mcomp->add_option("--theta", o.theta_path, "Inner symbol JSON")->required();
  add_caps(mcomp, true);
  mcomp->add_option("--operator", o.operator_path, "q x q matrix file (default identity)");
  mcomp->add_option("--m-max", o.m_max, "Largest power")->required();

  auto* block = app.add_subcommand("block-decompose", "One-variable block decomposition");
  add_common(block);
  add_input(block);
  block->add_option("--m-max", o.m_max, "Deepest shift");

  auto* bench = app.add_subcommand("bench-matvec", "Dense vs circulant-embedded matvec timing");
  add_common(bench);
  add_caps(bench, true);
  bench->add_option("--trials", o.trials, "Number of trials");
  bench->add_option("--p", o.p, "Block size");
  bench->add_option("--span", o.span, "Symbol frequencies in [-span, span]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (*symbol) return cmd_symbol(o, out);
    if (*toep) return cmd_toeplitz(o, out);
    if (*check) return cmd_check_toeplitz(o, out);
    if (*recover) return cmd_recover(o, out);
    if (*decomp) return cmd_decompose(o, out);
    if (*compact) return cmd_compactness(o, out);
    if (*model) return cmd_modelspace(o, out);
    if (*inv) return cmd_invariance(o, out);
    if (*mcomp) return cmd_model_compactness(o, out);
    if (*block) return cmd_block_decompose(o, out);
    if (*bench) return cmd_bench_matvec(o, out);
  } catch (const io::InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace hardy::cli
