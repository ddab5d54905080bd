#include "hardy/operators.hpp"
#include "hardy/random.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace hardy;

namespace {
using Matrix = MatrixX<Complex>;
Symbol scalar(int n, std::vector<std::pair<MultiIndex, Complex>> e) { return from_scalar_coefficients<Complex>(n, e); }
}  // namespace

TEST_CASE("toeplitz places phi_hat(l - k) at block (l, k)") {
  CHECK(toeplitz(constant_symbol<Complex>(1), Box{2}).matrix() == Matrix::Identity(3, 3));

  const Symbol phi = scalar(2, {{{0, 0}, 2.0}, {{1, 0}, 1.0}, {{0, -1}, 1.0}});
  const Operator t = toeplitz(phi, Box{1, 1});
  Matrix expected = 2.0 * Matrix::Identity(4, 4);
  expected(2, 0) = 1;  // row (1,0), col (0,0)
  expected(3, 1) = 1;  // row (1,1), col (0,1)
  expected(0, 1) = 1;  // row (0,0), col (0,1)
  expected(2, 3) = 1;  // row (1,0), col (1,1)
  CHECK(t.matrix() == expected);
  CHECK(t.structure().kind == StructureKind::toeplitz);

  Matrix lower = Matrix::Zero(4, 4);
  for (int i = 1; i < 4; ++i) lower(i, i - 1) = 1;
  CHECK(toeplitz(monomial<Complex>(MultiIndex{1}), Box{3}).matrix() == lower);

  CHECK_THROWS_AS(toeplitz(phi, Box{3}), std::invalid_argument);
}

TEST_CASE("toeplitz matches the all-pairs oracle and is diagonal-constant") {
  std::mt19937_64 rng(11);
  for (const Box& box : {Box{4}, Box{3, 2}, Box{2, 1, 2}, Box{1, 4}}) {
    for (int p : {1, 2}) {
      const Symbol s = random_trig_polynomial<Complex>(box.dimension(), p, -3, 3, rng);
      const Operator t = toeplitz(s, box);
      CHECK(t.matrix() == oracle::toeplitz(s, box));
      for (long r = 0; r < box.size(); ++r)
        for (long c = 0; c < box.size(); ++c)
          CHECK(t.block(box.index_at(r), box.index_at(c)) == s.coefficient(box.index_at(r) - box.index_at(c)));
    }
  }
}

TEST_CASE("shift") {
  const Operator s = shift<Complex>(Box{1, 1}, 0);
  Matrix expected = Matrix::Zero(4, 4);
  expected(2, 0) = 1;  // (0,0) -> (1,0)
  expected(3, 1) = 1;  // (0,1) -> (1,1)
  CHECK(s.matrix() == expected);
  CHECK(s.structure().kind == StructureKind::shift);

  Matrix s3(3, 3);
  s3 << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  CHECK(shift<Complex>(Box{2}, 0).matrix() == s3);
  CHECK_THROWS_AS(shift<Complex>(Box{2}, 1), std::invalid_argument);

  // S_j^* S_j = I - (projector onto the top layer k_j = d_j).
  for (const Box& box : {Box{3}, Box{2, 3}, Box{1, 2, 2}})
    for (int j = 0; j < box.dimension(); ++j)
      for (int p : {1, 2}) {
        const Operator sj = shift<Complex>(box, j, p);
        Matrix top = Matrix::Zero(sj.size(), sj.size());
        for (long pos = 0; pos < box.size(); ++pos)
          if (box.index_at(pos)[j] == box.cap(j)) top.block(pos * p, pos * p, p, p).setIdentity();
        CHECK(sj.matrix().adjoint() * sj.matrix() == Matrix::Identity(sj.size(), sj.size()) - top);
        CHECK(sj.matrix() == oracle::shift(box, j, p));
      }
}

TEST_CASE("layer_projector") {
  Matrix d = Matrix::Zero(5, 5);
  d(0, 0) = d(1, 1) = 1;
  CHECK(layer_projector<Complex>(Box{4}, 2).matrix() == d);
  CHECK(layer_projector<Complex>(Box{3, 3}, 0).matrix().isZero(0));
  CHECK_THROWS_AS(layer_projector<Complex>(Box{3, 2}, 4), std::invalid_argument);
  CHECK_THROWS_AS(layer_projector<Complex>(Box{3, 2}, -1), std::invalid_argument);

  for (const Box& box : {Box{4}, Box{3, 4}, Box{2, 3, 2}})
    for (int p : {1, 2})
      for (int m = 0; m <= box.min_cap() + 1; ++m) {
        const Matrix f = layer_projector<Complex>(box, m, p).matrix();
        CHECK(f * f == f);
        CHECK(f.adjoint() == f);
        CHECK(std::abs(f.trace() - Complex(p * std::pow(m, box.dimension()))) < 1e-12);
        CHECK(f == oracle::layer_projector(box, m, p));
        if (m > 0) CHECK(std::abs(operator_norm(layer_projector<Complex>(box, m, p)) - 1.0) < 1e-12);
      }
}

TEST_CASE("I - F_m is the signed sum over shift products") {
  for (int n = 1; n <= 3; ++n) {
    const Box box(std::vector<int>(static_cast<std::size_t>(n), 4));
    const long N = box.size();
    for (int m = 1; m <= 2; ++m) {
      Matrix sum = Matrix::Zero(N, N);
      for (int mask = 1; mask < (1 << n); ++mask) {
        Matrix prod = Matrix::Identity(N, N);
        int bits = 0;
        for (int i = 0; i < n; ++i)
          if (mask & (1 << i)) prod = prod * shift<Complex>(box, i).matrix(), ++bits;
        const Matrix pm = oracle::power(prod, m);
        sum += (bits % 2 ? 1.0 : -1.0) * pm * pm.adjoint();
      }
      const Matrix lhs = Matrix::Identity(N, N) - layer_projector<Complex>(box, m).matrix();
      CHECK((lhs - sum).cwiseAbs().maxCoeff() <= 1e-13);
    }
  }
}

TEST_CASE("apply_fast matches the dense matvec") {
  std::mt19937_64 rng(21);
  for (const Box& box : {Box{7, 7}, Box{15}, Box{3, 4, 2}, Box{0, 6}}) {
    for (int p : {1, 2}) {
      const Symbol s = random_trig_polynomial<Complex>(box.dimension(), p, -3, 3, rng);
      const Operator t = toeplitz(s, box);
      const VectorX<Complex> v = random_matrix<Complex>(t.size(), 1, rng);
      const VectorX<Complex> dense = t.matrix() * v;
      CHECK((apply_fast(t, v) - dense).norm() <= 1e-10 * dense.norm());
    }
  }
  const Operator id = toeplitz(constant_symbol<Complex>(2), Box{5, 5});
  const VectorX<Complex> v = random_matrix<Complex>(id.size(), 1, rng);
  CHECK((apply_fast(id, v) - v).norm() <= 1e-14 * v.norm());

  const Operator s1 = shift<Complex>(Box{4, 3}, 0);
  CHECK((apply_fast(s1, v.head(s1.size())) - s1.matrix() * v.head(s1.size())).norm() < 1e-13);

  CHECK_THROWS_AS(apply_fast(layer_projector<Complex>(Box{3}, 1), VectorX<Complex>(VectorX<Complex>::Zero(4))), std::invalid_argument);
  CHECK_THROWS_AS(apply_fast(id, VectorX<Complex>(VectorX<Complex>::Zero(3))), std::invalid_argument);
}

TEST_CASE("embedding sizes are the smallest powers of two >= 2d + 1") {
  const FastToeplitzApplier<Complex> fa(toeplitz(constant_symbol<Complex>(3), Box{7, 8, 0}));
  CHECK(fa.embedding_sizes() == std::vector<int>{16, 32, 1});
}

TEST_CASE("operator algebra") {
  const Box box{4};
  const Operator s = shift<Complex>(box, 0);
  const Operator top = subtract(toeplitz(constant_symbol<Complex>(1), box), layer_projector<Complex>(box, 4));
  CHECK(add(compose(adjoint(s), s), top).matrix() == Matrix::Identity(5, 5));

  std::mt19937_64 rng(2);
  const Operator t(Box{2, 2}, 1, random_matrix<Complex>(9, 9, rng));
  CHECK(adjoint(adjoint(t)).matrix() == t.matrix());
  CHECK(restrict_to(t, interior(t.box(), 0)).matrix() == t.matrix());
  CHECK(scale(t, Complex(2)).matrix() == 2.0 * t.matrix());

  const Symbol phi = random_trig_polynomial<Complex>(2, 1, -2, 2, rng);
  const Operator tp = toeplitz(phi, Box{4, 3});
  CHECK(restrict_to(tp, Box{2, 1}).matrix() == toeplitz(phi, Box{2, 1}).matrix());
  CHECK(adjoint(tp).matrix() == toeplitz(phi.adjoint(), Box{4, 3}).matrix());
  CHECK(adjoint(tp).structure().kind == StructureKind::toeplitz);

  CHECK_THROWS_AS(add(t, tp), std::invalid_argument);
  CHECK_THROWS_AS(restrict_to(t, Box{3, 0}), std::invalid_argument);
}

TEST_CASE("spectral_norm on zero-padded and rank-deficient matrices") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const long n = 41, k = 10 + trial % 7;
    Matrix a = Matrix::Zero(n, n);
    a.bottomRightCorner(k, k) = random_matrix<Complex>(k, k, rng);
    CHECK(std::abs(spectral_norm(a) - oracle::norm(a)) <= 1e-12 * oracle::norm(a));
    const Matrix low = random_matrix<Complex>(30, 3, rng) * random_matrix<Complex>(3, 25, rng);
    CHECK(std::abs(spectral_norm(low) - oracle::norm(low)) <= 1e-12 * oracle::norm(low));
  }
  CHECK(spectral_norm(Matrix(Matrix::Zero(5, 7))) == 0.0);
  CHECK(spectral_norm(Matrix(Matrix::Identity(6, 6))) == 1.0);
}

TEST_CASE("operator_norm") {
  CHECK(operator_norm(toeplitz(constant_symbol<Complex>(2), Box{3, 3})) == doctest::Approx(1.0).epsilon(1e-14));
  Matrix e0 = Matrix::Zero(6, 6);
  e0(0, 0) = 1;
  CHECK(operator_norm(Operator(Box{5}, 1, e0)) == doctest::Approx(1.0).epsilon(1e-14));

  const Symbol phi = scalar(1, {{{1}, 1.0}, {{-1}, 1.0}});
  const double n63 = operator_norm(toeplitz(phi, Box{63}));
  CHECK(std::abs(n63 - 2 * std::cos(std::numbers::pi / 65)) < 1e-12);
  const double n255 = operator_norm(toeplitz(phi, Box{255}));
  CHECK(n255 > n63);
  CHECK(2 - n255 < 1e-3);

  std::mt19937_64 rng(8);
  const Operator t(Box{4, 4}, 1, random_matrix<Complex>(25, 25, rng));
  const double dense = operator_norm(t);
  CHECK(std::abs(dense - oracle::norm(t.matrix())) < 1e-12 * dense);
  const auto est = power_iteration_norm(t.matrix(), 1e-14, 20000);
  CHECK(std::abs(est.value - dense) < 1e-6 * dense);
}

TEST_CASE("compress") {
  std::mt19937_64 rng(9);
  const Operator t(Box{3}, 1, random_matrix<Complex>(4, 4, rng));
  CHECK(compress(t, Matrix(Matrix::Identity(4, 4))) == t.matrix());
  const Matrix e0 = Matrix::Identity(4, 1);
  CHECK(compress(shift<Complex>(Box{3}, 0), e0).isZero(0));
  const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix<Complex>(4, 2, rng)).householderQ() * Matrix::Identity(4, 2);
  CHECK((compress(Matrix(Matrix::Identity(4, 4)), q) - Matrix::Identity(2, 2)).norm() < 1e-14);
  CHECK_THROWS_AS(compress(t, Matrix(2.0 * Matrix::Identity(4, 1))), std::invalid_argument);
}
