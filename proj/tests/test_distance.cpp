#include "doctest.h"

#include "lethargy/distance.hpp"
#include "lethargy/error.hpp"
#include "lethargy/simplex.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace lethargy;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

constexpr NormKind kAll[] = {NormKind::L1, NormKind::L2, NormKind::LInf};

}  // namespace

TEST_CASE("simplex on small programs") {
  // max x + y  s.t.  x + 2y <= 4, 3x + y <= 6
  Matrix A(2, 2);
  A << 1, 2, 3, 1;
  const LpResult r = solve_lp(A, vec({4, 6}), vec({1, 1}));
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(2.8).epsilon(1e-12));
  CHECK(r.x(0) == doctest::Approx(1.6));
  CHECK(r.x(1) == doctest::Approx(1.2));

  Matrix B(1, 1);
  B << -1;
  CHECK(solve_lp(B, vec({1}), vec({1})).status == LpStatus::Unbounded);

  // x <= 1 and -x <= -2
  Matrix C(2, 1);
  C << 1, -1;
  CHECK(solve_lp(C, vec({1, -2}), vec({1})).status == LpStatus::Infeasible);

  // Phase one with a negative right-hand side: max -x s.t. -x <= -3.
  CHECK(solve_lp(B, vec({-3}), vec({-1})).objective == doctest::Approx(-3));
}

TEST_CASE("scoped solver tolerance") {
  const double before = default_lp_options().tolerance;
  {
    const ScopedLpTolerance scoped(1e-9);
    CHECK(default_lp_options().tolerance == 1e-9);
  }
  CHECK(default_lp_options().tolerance == before);
}

TEST_CASE("norms") {
  CHECK(norm_of(vec({3, 4}), NormKind::L2) == 5);
  CHECK(norm_of(vec({3, -4}), NormKind::L1) == 7);
  CHECK(norm_of(vec({3, -4}), NormKind::LInf) == 4);
  CHECK(dual_norm_of(vec({1, -2}), NormKind::L1) == 2);
  CHECK(dual_norm_of(vec({1, -2}), NormKind::LInf) == 3);
}

TEST_CASE("documented distances") {
  const Subspace x_axis = Subspace::coordinate(1, 2);
  CHECK(distance(vec({3, 4}), x_axis, NormKind::L2).rho == doctest::Approx(4));
  CHECK(distance(vec({3, 4}), x_axis, NormKind::L1).rho == doctest::Approx(4));
  const Subspace diag({vec({1, -1, 0})}, 3);
  CHECK(distance(vec({1, 1, 1}), diag, NormKind::LInf).rho == doctest::Approx(1));
  const Vector m = distance(vec({3, 4}), x_axis, NormKind::L1).minimizer;
  CHECK(member(m, x_axis));
}

TEST_CASE("documented norming functionals") {
  const Subspace x_axis = Subspace::coordinate(1, 2);
  for (NormKind k : {NormKind::L2, NormKind::L1}) {
    const Functional f = norming_functional(vec({3, 4}), x_axis, k);
    CHECK(f.coeffs(0) == doctest::Approx(0).epsilon(1e-12));
    CHECK(f.coeffs(1) == doctest::Approx(1));
    CHECK(f(vec({3, 4})) == doctest::Approx(4));
  }
  const Functional g = norming_functional(vec({1, 1}), Subspace::zero(2), NormKind::LInf);
  CHECK(g(vec({1, 1})) == doctest::Approx(1));
  CHECK(oracle::dual_norm(g.coeffs, NormKind::LInf) <= 1 + 1e-12);
  CHECK(g.coeffs.minCoeff() >= -1e-12);
  CHECK_THROWS_AS(norming_functional(vec({1, 0}), x_axis, NormKind::L2), Error);
}

TEST_CASE("certify_distance") {
  const Subspace x_axis = Subspace::coordinate(1, 2);
  const auto ok = certify_distance(vec({3, 4}), x_axis, NormKind::L2, 4.0);
  CHECK(ok.pass);
  CHECK(ok.certificate.gap <= 1e-8);
  CHECK_FALSE(certify_distance(vec({3, 4}), x_axis, NormKind::L2, 3.9).pass);
}

TEST_CASE("distances agree with vertex enumeration") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(2, 7);
  for (int trial = 0; trial < 300; ++trial) {
    const Index D = dim(rng);
    const Index r = std::uniform_int_distribution<Index>(0, D - 1)(rng);
    const Matrix B = oracle::gaussian(rng, D, r);
    const Vector x = oracle::gaussian(rng, D);
    const Subspace Y(oracle::columns(B, r), D);
    for (NormKind k : kAll) {
      const DistanceResult d = distance(x, Y, k);
      const double expected = oracle::exact_distance(x, B, k);
      CHECK(d.rho == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
      CHECK(member(d.minimizer, Y, 1e-8));
      const Functional f = norming_functional(x, Y, k);
      CHECK(f(x) == doctest::Approx(expected).epsilon(1e-8).scale(1.0));
      CHECK(oracle::dual_norm(f.coeffs, k) <= 1 + 1e-9);
      for (Index j = 0; j < r; ++j) CHECK(std::abs(f(B.col(j))) <= 1e-8 * B.col(j).norm());
    }
  }
}

TEST_CASE("distances agree with the grid oracle in dimension 2 and 3") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const Index D = 2 + trial % 2;
    const Index r = 1 + (trial / 2) % (D - 1);
    const Matrix B = oracle::gaussian(rng, D, r);
    const Vector x = oracle::gaussian(rng, D);
    const Subspace Y(oracle::columns(B, B.cols()), D);
    for (NormKind k : kAll) {
      const auto c = certify_distance(x, Y, k, oracle::grid_distance(x, B, k), 1e-3);
      CHECK(c.pass);
    }
  }
}

TEST_CASE("certificates bracket tightly on random data") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Index D = 4 + trial % 9;
    const Index r = trial % std::min<Index>(D, 8);
    const Matrix B = oracle::gaussian(rng, D, r);
    const Vector x = oracle::gaussian(rng, D);
    const Subspace Y(oracle::columns(B, r), D);
    const NormKind k = oracle::norm_at(static_cast<std::size_t>(trial));
    const DistanceCertificate c = certify(x, Y, k);
    CHECK(c.lower <= c.upper + 1e-12);
    CHECK(c.gap <= 1e-8);
  }
}
