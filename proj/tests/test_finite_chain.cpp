#include "doctest.h"

#include "lethargy/distance.hpp"
#include "lethargy/error.hpp"
#include "lethargy/finite_chain.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>

using namespace lethargy;

namespace {

Vector e(Index i, Index D) { return Vector::Unit(D, i); }

void check_distances(const Vector& x, const Chain& chain, const std::vector<double>& d, NormKind k, double tol) {
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto c = certify_distance(x, chain[i], k, d[i], tol * std::max(1.0, d[i]));
    CHECK_MESSAGE(c.pass, "level ", i + 1, " lower ", c.certificate.lower, " upper ", c.certificate.upper);
  }
}

}  // namespace

TEST_CASE("documented two-step chains") {
  const Chain chain = coordinate_chain({1, 2}, 3);
  const std::vector<double> d{2.0, 1.0};
  SUBCASE("Euclidean") {
    const AnchoredElement a = construct_finite(chain, d, e(2, 3), NormKind::L2);
    check_distances(a.x, chain, d, NormKind::L2, 1e-10);
    // Closed form: rho(x, Y_1)^2 = x2^2 + x3^2, rho(x, Y_2) = |x3|.
    CHECK(std::hypot(a.x(1), a.x(2)) == doctest::Approx(2.0));
    CHECK(std::abs(a.x(2)) == doctest::Approx(1.0));
    CHECK(a.lambda == doctest::Approx(1.0));
    CHECK(a.anchor_residual <= 1e-12);
  }
  SUBCASE("max norm") {
    const AnchoredElement a = construct_finite(chain, d, e(2, 3), NormKind::LInf);
    check_distances(a.x, chain, d, NormKind::LInf, 1e-10);
    const Matrix B1 = Subspace::coordinate(1, 3).basis();
    const Matrix B2 = Subspace::coordinate(2, 3).basis();
    CHECK(oracle::grid_distance(a.x, B1, NormKind::LInf) == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(oracle::grid_distance(a.x, B2, NormKind::LInf) == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("precondition errors") {
  const Chain chain = coordinate_chain({1, 2}, 3);
  auto kind_of = [&](std::vector<double> d, Vector z) {
    try {
      construct_finite(chain, d, z, NormKind::L2);
    } catch (const Error& err) {
      return err.kind();
    }
    return ErrorKind::TamperDetected;
  };
  CHECK(kind_of({1.0, 1.0}, e(2, 3)) == ErrorKind::NotStrictlyDecreasing);
  CHECK(kind_of({2.0, 1.0}, e(1, 3)) == ErrorKind::AnchorInsideTop);
  CHECK(kind_of({2.0, 1.0}, Vector::Unit(4, 3)) == ErrorKind::DimMismatch);
}

TEST_CASE("zero last target gives lambda zero") {
  const Chain chain = coordinate_chain({1, 2, 3}, 4);
  const std::vector<double> d{1.0, 0.5, 0.0};
  const AnchoredElement a = construct_finite(chain, d, e(3, 4), NormKind::L1);
  CHECK(a.lambda == 0.0);
  CHECK(member(a.x, chain[2]));
  check_distances(a.x, chain, d, NormKind::L1, 1e-10);
}

TEST_CASE("random chains in every norm") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const NormKind k = oracle::norm_at(static_cast<std::size_t>(trial));
    const Index D = 3 + trial % 5;
    const std::size_t len = 1 + static_cast<std::size_t>(trial) % std::min<std::size_t>(5, D - 1);
    const Matrix g = oracle::gaussian(rng, D, D);
    Chain chain;
    chain.ambient_dim = D;
    for (std::size_t i = 0; i < len; ++i) chain.subspaces.emplace_back(oracle::columns(g, static_cast<Index>(i + 1)), D);
    std::vector<double> d(len);
    double v = 1.0 + std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    for (double& x : d) {
      x = v;
      v *= std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    }
    const Vector z = oracle::gaussian(rng, D);
    const AnchoredElement a = construct_finite(chain, d, z, k);
    for (std::size_t i = 0; i < len; ++i) {
      CHECK(oracle::exact_distance(a.x, g.leftCols(static_cast<Index>(i + 1)), k) ==
            doctest::Approx(d[i]).epsilon(1e-8));
    }
    CHECK(oracle::norm(a.x, k) <= d[0] + 1.0);
    CHECK(a.lambda > 0.0);
    CHECK(member(a.x - a.lambda * z, chain[len - 1], 1e-8));
  }
}
