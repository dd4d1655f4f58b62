#include "doctest.h"

#include "lethargy/distance.hpp"
#include "lethargy/error.hpp"
#include "lethargy/pair.hpp"
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

const Subspace kOrigin = Subspace::zero(2);
const Subspace kAxis = Subspace::coordinate(1, 2);
const Subspace kPlane = Subspace::full(2);

}  // namespace

TEST_CASE("pivot on the toy triple") {
  for (NormKind k : {NormKind::L1, NormKind::L2, NormKind::LInf}) {
    const Vector z = find_pivot(kOrigin, kAxis, kPlane, k);
    CHECK(oracle::norm(z, k) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(z(1)) == doctest::Approx(1.0).epsilon(1e-10));
  }
  const Vector z = find_pivot(kOrigin, kAxis, kPlane, NormKind::L2);
  CHECK(std::abs(z(0)) == doctest::Approx(std::sqrt(3.0)));
  CHECK_THROWS_AS(find_pivot(kAxis, kAxis, kPlane, NormKind::L2), Error);
}

TEST_CASE("delta search against the quadratic closed form") {
  const Vector z = vec({std::sqrt(3.0), 1.0});
  // h(a)^2 = 3 (1 - a)^2 + 1 = 1 at a = 1 only.
  const DeltaSearch a = find_delta(z, vec({std::sqrt(3.0), 0.0}), kOrigin, 0.0, NormKind::L2);
  CHECK(a.delta_min == doctest::Approx(1.0));
  CHECK(a.delta_max == doctest::Approx(std::sqrt(3.0)));
  CHECK(a.delta == doctest::Approx(1.0).epsilon(1e-9));

  // (sqrt3 - 0.982 a)^2 + 1 = 1.5625: roots near 1.0 and 2.527.
  const double w0 = std::sqrt(3.0) - 0.75;
  const DeltaSearch b = find_delta(z, vec({w0, 0.0}), kOrigin, 0.25, NormKind::L2);
  const double big = (std::sqrt(3.0) + std::sqrt(0.5625)) / w0;
  CHECK(b.delta == doctest::Approx(big).epsilon(1e-9));
  CHECK(b.delta == doctest::Approx(2.527).epsilon(1e-3));
  CHECK(std::hypot(z(0) - b.delta * w0, 1.0) == doctest::Approx(1.25).epsilon(1e-10));

  CHECK_THROWS_AS(find_delta(z, Vector::Zero(2), kOrigin, 0.0, NormKind::L2), Error);
}

TEST_CASE("context invariants") {
  for (NormKind k : {NormKind::L1, NormKind::L2, NormKind::LInf}) {
    const PairContext ctx = make_pair_context(kOrigin, kAxis, kPlane, k);
    CHECK(distance(ctx.z, kOrigin, k).rho == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(distance(ctx.z, kAxis, k).rho == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(member(ctx.w, kAxis));
    CHECK(oracle::norm(ctx.z - ctx.w, k) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(distance(ctx.z - ctx.delta * ctx.w, kOrigin, k).rho == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(distance(ctx.s, kAxis, k).rho == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(member(ctx.t, kAxis));
  }
}

TEST_CASE("documented level elements") {
  const PairContext l2 = make_pair_context(kOrigin, kAxis, kPlane, NormKind::L2);
  const LevelElement a = two_level_element(l2, 1.5, 1.0);
  CHECK(a.mu == doctest::Approx(std::sqrt(1.25)).epsilon(1e-10));
  CHECK(a.q.norm() == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(std::abs(a.q(1)) == doctest::Approx(1.0).epsilon(1e-10));

  // The max-norm nearest point is not unique; pin the generators of the example.
  PairContext inf = make_pair_context(kOrigin, kAxis, kPlane, NormKind::LInf);
  inf.s = vec({0, 1});
  inf.t = vec({1, 0});
  const LevelElement b = two_level_element(inf, 2.0, 1.0);
  CHECK(b.mu == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(b.q(0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(b.q(1) == doctest::Approx(1.0).epsilon(1e-10));

  const LevelElement own = two_level_element(make_pair_context(kOrigin, kAxis, kPlane, NormKind::LInf), 2.0, 1.0);
  CHECK(own.q.cwiseAbs().maxCoeff() == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(std::abs(own.q(1)) == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(two_level_element(l2, 1.0, 1.0), Error);
}

TEST_CASE("pair families") {
  const PairFamily f = pair_family(kOrigin, kAxis, kPlane, {{1.5, 1.0}, {1.25, 1.0}}, NormKind::L2);
  REQUIRE(f.elements.size() == 2);
  const double gap = (f.elements[0].q - f.elements[1].q).norm();
  CHECK(gap <= f.context.lipschitz_c * (1.5 - 1.0) + 1e-12);
  CHECK(f.context.lipschitz_c >= 1.0);

  const PairFamily one = pair_family(kOrigin, kAxis, kPlane, {{2.0, 1.0}}, NormKind::L2);
  CHECK(one.context.lipschitz_c == 1.0);
  CHECK_THROWS_AS(pair_family(kOrigin, kAxis, kPlane, {{1.0, 1.0}}, NormKind::L2), Error);
}

TEST_CASE("random levels in a larger triple") {
  std::mt19937_64 rng(99);
  const Matrix g = oracle::gaussian(rng, 5, 5);
  const Subspace q1(oracle::columns(g, 1), 5);
  const Subspace q2(oracle::columns(g, 3), 5);
  const Subspace q3(oracle::columns(g, 4), 5);
  for (NormKind k : {NormKind::L1, NormKind::L2, NormKind::LInf}) {
    const PairContext ctx = make_pair_context(q1, q2, q3, k);
    for (int i = 0; i < 10; ++i) {
      const double v = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
      const double u = v + std::uniform_real_distribution<double>(0.01, 2.0)(rng);
      const LevelElement el = two_level_element(ctx, u, v);
      CHECK(oracle::exact_distance(el.q, g.leftCols(1), k) == doctest::Approx(u).epsilon(1e-8));
      CHECK(oracle::exact_distance(el.q, g.leftCols(3), k) == doctest::Approx(v).epsilon(1e-8).scale(1.0));
      CHECK(member(el.q, q3, 1e-8));
    }
  }
}

TEST_CASE("documented probes") {
  const double r3 = std::sqrt(3.0);
  const FunctionalProbe e =
      prescribed_functional_probe(vec({r3, 0.0}), vec({r3, 1.0}), kOrigin, 1.0, Orientation::Minus, NormKind::L2);
  CHECK(e.nu == doctest::Approx(1.0 - 1.0 / r3));
  CHECK(e.required_norm == doctest::Approx(1.0 / r3));
  CHECK(e.achieved_norm == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(e.margin == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK_FALSE(e.feasible);

  const FunctionalProbe l1 =
      prescribed_functional_probe(vec({1, 0}), vec({0, 1}), kOrigin, 0.0, Orientation::Minus, NormKind::L1);
  CHECK(l1.nu == doctest::Approx(-1.0));
  CHECK(l1.required_norm == doctest::Approx(1.0));
  CHECK(l1.feasible);
  CHECK(l1.functional(0) == doctest::Approx(1.0));
  CHECK(l1.functional(1) == doctest::Approx(-1.0));
  CHECK(oracle::dual_norm(l1.functional, NormKind::L1) == doctest::Approx(1.0));

  const FunctionalProbe l2 =
      prescribed_functional_probe(vec({1, 0}), vec({0, 1}), kOrigin, 0.0, Orientation::Minus, NormKind::L2);
  CHECK(l2.achieved_norm == doctest::Approx(std::sqrt(2.0)));
  CHECK_FALSE(l2.feasible);

  CHECK(parse_orientation(to_string(Orientation::Plus)) == Orientation::Plus);
}
