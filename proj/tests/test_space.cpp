#include "doctest.h"

#include "lethargy/error.hpp"
#include "lethargy/space.hpp"
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

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("norm tags round-trip") {
  for (NormKind k : {NormKind::L1, NormKind::L2, NormKind::LInf}) CHECK(parse_norm(to_string(k)) == k);
  CHECK(parse_norm("LINF") == NormKind::LInf);
  CHECK(dual_of(NormKind::L1) == NormKind::LInf);
  CHECK(dual_of(NormKind::L2) == NormKind::L2);
  CHECK_THROWS_AS(parse_norm("L3"), Error);
}

TEST_CASE("coordinate chains") {
  const Chain c = coordinate_chain({1, 2, 3}, 4);
  REQUIRE(c.size() == 3);
  CHECK(c.ranks() == std::vector<Index>{1, 2, 3});
  CHECK(validate_chain(c).ok);

  const Chain z = coordinate_chain({0, 2}, 3);
  CHECK(z[0].is_zero());
  CHECK(z[1].rank() == 2);

  CHECK(kind_of([] { coordinate_chain({2, 2}, 3); }) == ErrorKind::NonIncreasingDims);
  CHECK(kind_of([] { coordinate_chain({1, 4}, 3); }) == ErrorKind::DimExceedsAmbient);
}

TEST_CASE("canonical form ignores the presentation of the basis") {
  const Subspace a({vec({1, 1, 0}), vec({0, 1, 0})}, 3);
  const Subspace b({vec({2, 0, 0}), vec({1, -3, 0})}, 3);
  CHECK(a.rank() == 2);
  CHECK((a.canonical() - b.canonical()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a.orthonormal().transpose() * a.orthonormal() - Matrix::Identity(2, 2)).norm() < 1e-12);
  CHECK(kind_of([] { Subspace({vec({1, 2}), vec({2, 4})}, 2); }) == ErrorKind::LinearlyDependentBasis);
  CHECK(kind_of([] { Subspace({vec({1, 2, 3})}, 2); }) == ErrorKind::DimMismatch);
}

TEST_CASE("membership and nesting") {
  const Subspace s = Subspace::coordinate(2, 3);
  CHECK(member(vec({1, 0, 0}), s));
  CHECK_FALSE(member(vec({0, 0, 1}), s));
  CHECK(member(Vector::Zero(3), Subspace::zero(3)));
  CHECK(strictly_nested(Subspace::coordinate(1, 3), s));
  CHECK_FALSE(strictly_nested(s, s));
  CHECK_FALSE(strictly_nested(Subspace({vec({0, 0, 1})}, 3), s));

  const Vector g = first_generator_outside(s, Subspace::coordinate(1, 3));
  CHECK(member(g, s));
  CHECK_FALSE(member(g, Subspace::coordinate(1, 3)));

  const Subspace e = extend_within(Subspace::coordinate(1, 4), Subspace::full(4), 3);
  CHECK(e.rank() == 3);
  CHECK(strictly_nested(Subspace::coordinate(1, 4), e));
}

TEST_CASE("chain diagnostics") {
  Chain equal;
  equal.ambient_dim = 3;
  equal.subspaces = {Subspace::coordinate(1, 3), Subspace::coordinate(1, 3)};
  const auto d1 = validate_chain(equal);
  CHECK_FALSE(d1.ok);
  CHECK(d1.first == 1);
  CHECK(d1.second == 2);

  Chain skew;
  skew.ambient_dim = 3;
  skew.subspaces = {Subspace({vec({0, 0, 1})}, 3), Subspace::coordinate(2, 3)};
  const auto d2 = validate_chain(skew);
  CHECK_FALSE(d2.ok);
  CHECK(d2.message.find("nesting") != std::string::npos);

  Chain full;
  full.ambient_dim = 2;
  full.subspaces = {Subspace::coordinate(1, 2), Subspace::full(2)};
  CHECK_FALSE(validate_chain(full).ok);
}

TEST_CASE("random nested chains validate") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix g = oracle::gaussian(rng, 8, 6);
    Chain c;
    c.ambient_dim = 8;
    for (Index r = 1; r <= 6; r += 1 + trial % 2) c.subspaces.emplace_back(oracle::columns(g, r), 8);
    CHECK(validate_chain(c).ok);
    for (std::size_t i = 0; i + 1 < c.size(); ++i) CHECK(strictly_nested(c[i], c[i + 1]));
  }
}

TEST_CASE("geometric tails are exact") {
  const auto s = DeviationSequence::geometric(1.0, 0.5, 10);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.value(i) == std::ldexp(1.0, -static_cast<int>(i + 1)));
    CHECK(s.tail(i) == s.value(i));
  }
  const auto t = DeviationSequence::geometric(1.0, 1.0 / 3.0, 6);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(t.tail(i) == doctest::Approx(t.value(i) / 2).epsilon(1e-15));
}

TEST_CASE("power tails match direct summation") {
  const auto s = DeviationSequence::power(2.0, 8);
  // Partial sums to 10^6 plus the integral remainder 1/K.
  double tail = 1.0 / 1e6;
  for (int k = 1000000; k > 8; --k) tail += 1.0 / (static_cast<double>(k) * k);
  CHECK(s.tail(7) == doctest::Approx(tail).epsilon(1e-9));
  CHECK(s.tail(0) == doctest::Approx(M_PI * M_PI / 6 - 1).epsilon(1e-12));
  CHECK(std::isinf(DeviationSequence::power(1.0, 3).tail(2)));
}

TEST_CASE("tail condition") {
  CHECK(check_tail_condition(DeviationSequence::geometric(1.0, 0.5, 12)) == 1);
  CHECK(check_tail_condition(DeviationSequence::explicit_values({1.0, 0.6, 0.5}, 0.0)) == 2);
  CHECK(check_tail_condition(DeviationSequence::with_geometric_tail({5.0, 1.0, 0.5, 0.25}, 0.5)) == 1);
  CHECK(kind_of([] { check_tail_condition(DeviationSequence::power(2.0, 8)); }) == ErrorKind::NoAdmissibleStart);
}

TEST_CASE("sequence validation and slicing") {
  CHECK(kind_of([] { DeviationSequence::explicit_values({1.0, 2.0}, 0.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { DeviationSequence::explicit_values({1.0, -1.0}, 0.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { DeviationSequence::explicit_values({1.0, 0.0}, 0.5); }) == ErrorKind::InvalidArgument);
  const auto s = DeviationSequence::geometric(1.0, 0.5, 6);
  const auto t = s.slice(2, 4);
  CHECK(t.size() == 2);
  CHECK(t.value(0) == s.value(2));
  CHECK(t.tail(1) == s.tail(3));
  CHECK(DeviationSequence::explicit_values({1.0, 0.5, 0.0, 0.0}, 0.0).first_zero() == std::optional<std::size_t>(2));
}
