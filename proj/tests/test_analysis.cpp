#include "hardy/analysis.hpp"
#include "hardy/random.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace hardy;

namespace {
using Matrix = MatrixX<Complex>;
Symbol scalar(int n, std::vector<std::pair<MultiIndex, Complex>> e) { return from_scalar_coefficients<Complex>(n, e); }

Operator rank_one(const Box& box, int p = 1) {
  Matrix m = Matrix::Zero(box.size() * p, box.size() * p);
  m(0, 0) = 1;
  return Operator(box, p, m);
}

double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}
}  // namespace

TEST_CASE("toeplitz_defect") {
  std::mt19937_64 rng(1);
  const Symbol s = random_trig_polynomial<Complex>(2, 1, -2, 2, rng);
  const auto rep = toeplitz_defect(toeplitz(s, Box{4, 3}));
  CHECK(rep.overall == 0.0);
  CHECK(rep.is_toeplitz);
  CHECK_FALSE(rep.witness.has_value());

  const auto r1 = toeplitz_defect(rank_one(Box{3}));
  CHECK(r1.per_direction[0] == 1.0);
  CHECK_FALSE(r1.is_toeplitz);
  REQUIRE(r1.witness.has_value());
  CHECK(r1.witness->row == MultiIndex{0});
  CHECK(r1.witness->col == MultiIndex{0});

  CHECK(toeplitz_defect(toeplitz(constant_symbol<Complex>(3), Box{2, 2, 2})).overall == 0.0);
  // Caps of zero leave nothing to compare in that direction.
  CHECK(toeplitz_defect(rank_one(Box{0, 3})).per_direction[0] == 0.0);
}

TEST_CASE("recover_symbol") {
  std::mt19937_64 rng(2);
  for (int p : {1, 2}) {
    const Symbol s = random_trig_polynomial<Complex>(2, p, -2, 2, rng);
    const auto rec = recover_symbol(toeplitz(s, Box{3, 3}));
    CHECK(rec.max_deviation == 0.0);
    CHECK(rec.symbol.coefficients() == s.coefficients());
  }

  const auto r1 = recover_symbol(rank_one(Box{4}));
  CHECK(r1.symbol.scalar_coefficient({0}) == Complex(1.0 / 5));
  CHECK(r1.deviation.at(MultiIndex{0}) == 1.0);
  CHECK(r1.max_deviation == 1.0);

  const auto rs = recover_symbol(shift<Complex>(Box{5}, 0));
  CHECK(rs.symbol.coefficients().size() == 1);
  CHECK(rs.symbol.scalar_coefficient({1}) == Complex(1));
  CHECK(rs.max_deviation == 0.0);
}

TEST_CASE("zero defect implies exact reconstruction") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Box box{3 + trial % 3, 2 + trial % 2};
    const Symbol s = random_trig_polynomial<Complex>(2, 1, -4, 4, rng);
    const Operator t = toeplitz(s, box);
    REQUIRE(toeplitz_defect(t).overall == 0.0);
    const auto rec = recover_symbol(t);
    CHECK(rec.max_deviation == 0.0);
    CHECK((toeplitz(rec.symbol, box).matrix() - t.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("asymptotic_sequence") {
  const Symbol phi = scalar(1, {{{1}, 1.0}, {{-1}, 1.0}, {{0}, 0.5}});
  const auto seq = asymptotic_sequence(toeplitz(phi, Box{8}), 0, 5);
  for (int m = 0; m <= 5; ++m) CHECK(seq.sections[static_cast<std::size_t>(m)] == toeplitz(phi, Box{8 - m}).matrix());
  for (double s : seq.step_norms) CHECK(s == 0.0);
  CHECK(seq.cauchy);

  const Operator tk = add(toeplitz(phi, Box{8}), rank_one(Box{8}));
  const auto seq2 = asymptotic_sequence(tk, 0, 5);
  CHECK(seq2.step_norms[0] == doctest::Approx(1.0));
  for (int m = 1; m < 5; ++m) {
    CHECK(seq2.step_norms[static_cast<std::size_t>(m)] == 0.0);
    CHECK(seq2.sections[static_cast<std::size_t>(m)] == toeplitz(phi, Box{8 - m}).matrix());
  }

  // Flip: B_m is the anti-diagonal l + k = d - 2m; consecutive steps never settle at this scale.
  const auto flip = asymptotic_sequence(flip_operator<Complex>(Box{8}), 0, 4);
  CHECK_FALSE(flip.cauchy);
  for (int m = 0; m < 4; ++m) {
    const Matrix& b = flip.sections[static_cast<std::size_t>(m)];
    for (long l = 0; l < b.rows(); ++l)
      for (long k = 0; k < b.cols(); ++k) CHECK(b(l, k) == Complex(l + k == 8 - 2 * m ? 1 : 0));
  }
  CHECK(flip.step_norms[0] > 1.8);

  CHECK_THROWS_AS(asymptotic_sequence(tk, 0, 9), std::invalid_argument);
  CHECK_THROWS_AS(asymptotic_sequence(tk, 1, 2), std::invalid_argument);
}

TEST_CASE("cross_term_profile") {
  std::mt19937_64 rng(5);
  const Operator t(Box{4, 4}, 1, random_matrix<Complex>(25, 25, rng));
  for (double v : cross_term_profile(t, t, 0, 1, 4)) CHECK(v == 0.0);

  const Operator zero(Box{4, 4}, 1, Matrix::Zero(25, 25));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const auto prof = cross_term_profile(rank_one(Box{4, 4}), zero, i, j, 4);
      CHECK(prof[0] == 1.0);
      for (int m = 1; m <= 4; ++m) CHECK(prof[static_cast<std::size_t>(m)] == 0.0);
    }

  const Operator id = toeplitz(constant_symbol<Complex>(2), Box{4, 4});
  const auto prof = cross_term_profile(id, zero, 0, 1, 4);
  for (double v : prof) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  for (int m = 0; m <= 4; ++m) {
    const Matrix sec = oracle::cross_section(id.matrix(), id.box(), 1, 0, 1, m);
    CHECK((sec.array() != Complex(0)).count() > 0);
    CHECK(oracle::norm(sec) == doctest::Approx(1.0));
  }

  CHECK_THROWS_AS(cross_term_profile(id, zero, 0, 1, 5), std::invalid_argument);
}

TEST_CASE("compactness_profile") {
  const auto r1 = compactness_profile(rank_one(Box{5, 5}), 6, 1e-12);
  CHECK(r1.values[0] == 1.0);
  for (int m = 1; m <= 6; ++m) CHECK(r1.values[static_cast<std::size_t>(m)] == 0.0);
  CHECK(r1.numerically_compact);

  const auto id = compactness_profile(toeplitz(constant_symbol<Complex>(1), Box{4}), 5, 1e-12);
  for (int m = 0; m <= 4; ++m) CHECK(id.values[static_cast<std::size_t>(m)] == doctest::Approx(1.0));
  CHECK(id.values[5] == 0.0);

  Matrix d = Matrix::Zero(20, 20);
  for (int k = 0; k < 20; ++k) d(k, k) = 1.0 / (k + 1);
  const auto harm = compactness_profile(Operator(Box{19}, 1, d), 10, 1e-12);
  for (int m = 0; m <= 10; ++m) CHECK(std::abs(harm.values[static_cast<std::size_t>(m)] - 1.0 / (m + 1)) < 1e-14);
  CHECK_FALSE(harm.numerically_compact);

  CHECK_THROWS_AS(compactness_profile(rank_one(Box{3, 2}), 4), std::invalid_argument);
}

TEST_CASE("finite-rank operators on layers < m0 have c_m = 0 from m0 on") {
  std::mt19937_64 rng(6);
  for (int m0 = 1; m0 <= 3; ++m0)
    for (int p : {1, 2}) {
      const Operator k = random_layer_operator<Complex>(Box{5, 4}, p, m0, rng);
      const auto prof = compactness_profile(k, 5);
      for (int m = m0; m <= 5; ++m) CHECK(prof.values[static_cast<std::size_t>(m)] == 0.0);
      CHECK(prof.values[static_cast<std::size_t>(m0 - 1)] > 0.0);
    }
}

TEST_CASE("asymptotic_decompose splits Toeplitz plus rank one") {
  const Symbol phi = scalar(1, {{{1}, 1.0}, {{-1}, 1.0}});
  const Operator t = add(toeplitz(phi, Box{15}), rank_one(Box{15}));
  const auto res = asymptotic_decompose(t, 1e-8);
  CHECK(res.verdict);
  CHECK(res.m_max == 7);
  CHECK(res.depth == 7);
  CHECK(res.recovered.symbol.coefficients() == phi.coefficients());
  CHECK(res.remainder.matrix() == rank_one(Box{15}).matrix());
  CHECK(res.toeplitz_part_defect.overall == 0.0);
  for (int m = 1; m <= 7; ++m) CHECK(res.remainder_profile.values[static_cast<std::size_t>(m)] == 0.0);
  for (const auto& c : res.cross_terms)
    for (int m = 1; m <= 7; ++m) CHECK(c.norms[static_cast<std::size_t>(m)] == 0.0);
  CHECK((add(res.toeplitz_part, res.remainder).matrix() - t.matrix()).isZero(0));
}

TEST_CASE("asymptotic_decompose on Toeplitz and flip inputs") {
  std::mt19937_64 rng(7);
  const Symbol phi = random_trig_polynomial<Complex>(2, 1, -2, 2, rng);
  const auto res = asymptotic_decompose(toeplitz(phi, Box{8, 8}));
  CHECK(res.verdict);
  CHECK(res.remainder.matrix().cwiseAbs().maxCoeff() == 0.0);

  const auto flip = asymptotic_decompose(flip_operator<Complex>(Box{8}));
  CHECK_FALSE(flip.verdict);
  REQUIRE(flip.failing_direction.has_value());
  CHECK(*flip.failing_direction == 0);
  CHECK(flip.witness_step_norm > 1.8);
  CHECK((add(flip.toeplitz_part, flip.remainder).matrix() - flip_operator<Complex>(Box{8}).matrix()).isZero(0));

  CHECK_THROWS_AS(asymptotic_decompose(rank_one(Box{1, 5})), std::invalid_argument);
}

TEST_CASE("feintuch_decompose recovers a block symbol") {
  MatrixX<Complex> e12 = Matrix::Zero(2, 2), e21 = Matrix::Zero(2, 2);
  e12(0, 1) = 1;
  e21(1, 0) = 1;
  const Symbol big_phi = from_coefficients<Complex>(1, 2, {{MultiIndex{0}, Matrix::Identity(2, 2)}, {MultiIndex{1}, e12}});
  const Box box{11};
  Matrix k = Matrix::Zero(24, 24);
  k.block(0, 0, 2, 2) = e21;
  const Operator t = add(toeplitz(big_phi, box), Operator(box, 2, k));
  const auto res = feintuch_decompose(t, 1e-10);
  CHECK(res.verdict);
  CHECK(res.recovered.symbol.coefficients() == big_phi.coefficients());
  CHECK(res.remainder.matrix() == k);

  const auto flip = feintuch_decompose(flip_operator<Complex>(Box{9}, 2));
  CHECK_FALSE(flip.verdict);

  CHECK_THROWS_AS(feintuch_decompose(rank_one(Box{4, 4})), std::invalid_argument);
}

TEST_CASE("feintuch_decompose with p = 1 reproduces asymptotic_decompose bit for bit") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const Symbol phi = random_trig_polynomial<Complex>(1, 1, -3, 3, rng);
    const Operator t = add(toeplitz(phi, Box{13}), random_layer_operator<Complex>(Box{13}, 1, 2, rng));
    const auto a = asymptotic_decompose(t, 1e-9);
    const auto b = feintuch_decompose(t, 1e-9);
    CHECK(a.verdict == b.verdict);
    CHECK(a.recovered.symbol.coefficients() == b.recovered.symbol.coefficients());
    CHECK(a.remainder.matrix() == b.remainder.matrix());
    CHECK(a.remainder_profile.values == b.remainder_profile.values);
    CHECK(a.sequences[0].step_norms == b.sequences[0].step_norms);
  }
}

TEST_CASE("analysis operations agree with brute-force oracles") {
  std::mt19937_64 rng(9);
  for (const Box& box : {Box{5}, Box{3, 3}, Box{2, 1, 2}, Box{4, 2}}) {
    for (int p : {1, 2}) {
      const long dim = box.size() * p;
      const Operator t(box, p, random_matrix<Complex>(dim, dim, rng));
      const auto d = toeplitz_defect(t);
      const auto od = oracle::defect(t.matrix(), box, p);
      CHECK(max_abs(d.per_direction, od.per_direction) <= 1e-10);

      const auto rec = recover_symbol(t);
      const auto orec = oracle::recover(t.matrix(), box, p);
      for (const auto& [f, mean] : orec.mean) {
        CHECK((rec.symbol.coefficient(f) - mean).norm() <= 1e-10);
        CHECK(std::abs(rec.deviation.at(f) - orec.spread.at(f)) <= 1e-10);
      }

      for (int i = 0; i < box.dimension(); ++i) {
        const auto seq = asymptotic_sequence(t, i, box.cap(i));
        CHECK(max_abs(seq.step_norms, oracle::steps(t.matrix(), box, p, i, box.cap(i))) <= 1e-10);
        for (int j = 0; j < box.dimension(); ++j) {
          const int mm = std::min(box.cap(i), box.cap(j));
          const auto prof = cross_term_profile(t, Operator(box, p, Matrix::Zero(dim, dim)), i, j, mm);
          for (int m = 0; m <= mm; ++m)
            CHECK(std::abs(prof[static_cast<std::size_t>(m)] - oracle::norm(oracle::cross_section(t.matrix(), box, p, i, j, m))) <= 1e-10);
        }
      }
      const int mm = box.min_cap() + 1;
      CHECK(max_abs(compactness_profile(t, mm).values, oracle::compactness(t.matrix(), box, p, mm)) <= 1e-10);
    }
  }
}
