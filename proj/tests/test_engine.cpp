#include "doctest.h"

#include "lethargy/engine.hpp"
#include "lethargy/error.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace lethargy;

namespace {

std::vector<Index> iota(Index from, Index to) {
  std::vector<Index> v;
  for (Index i = from; i <= to; ++i) v.push_back(i);
  return v;
}

void check_rows_exact(const Vector& x, const Chain& chain, const DeviationSequence& seq, NormKind k) {
  for (std::size_t n = 0; n < chain.size(); ++n) {
    const double expected = seq.value(n);
    const double got = oracle::exact_distance(x, chain[n].basis(), k);
    CHECK_MESSAGE(std::abs(got - expected) <= 1e-8 * std::max(1.0, expected), "n = ", n + 1, " rho = ", got,
                  " d = ", expected);
  }
}

}  // namespace

TEST_CASE("reduction plans") {
  const Chain c4 = coordinate_chain({1, 2, 3, 4}, 6);
  const ReductionPlan trivial = preprocess(c4, DeviationSequence::geometric(1.0, 0.5, 4));
  CHECK(trivial.trivial());
  CHECK(trivial.n0 == 1);

  const ReductionPlan five = preprocess(c4, DeviationSequence::with_geometric_tail({5, 1, 0.5, 0.25}, 0.5));
  CHECK(five.n0 == 1);
  CHECK_FALSE(five.head_fix);

  CHECK_THROWS_WITH_AS(preprocess(coordinate_chain({1, 2, 3, 4, 5}, 6),
                                  DeviationSequence::with_geometric_tail({1, 1, 0.5, 0.25, 0.125}, 0.5)),
                       doctest::Contains("HeadTies"), Error);

  const ReductionPlan zero = preprocess(c4, DeviationSequence::explicit_values({1, 0.5, 0, 0}, 0));
  REQUIRE(zero.zero_from.has_value());
  CHECK(*zero.zero_from == 3);
  CHECK(zero.last == 2);

  const ReductionPlan origin =
      preprocess(coordinate_chain({0, 1, 2}, 3), DeviationSequence::geometric(1.0, 0.5, 3));
  CHECK(origin.zero_first_subspace);
  CHECK(origin.start == 2);
}

TEST_CASE("level elements") {
  const Chain chain = coordinate_chain({1, 2, 3}, 5);
  const auto finite = DeviationSequence::explicit_values({1.0, 0.5, 0.25}, 0.0);
  for (const LevelData& l : level_elements(chain, finite, 1, 3, Subspace::full(5), NormKind::L2)) {
    CHECK(l.u == 1.0);
  }
  const auto geo = DeviationSequence::geometric(1.0, 0.5, 3);
  for (NormKind k : {NormKind::L1, NormKind::L2, NormKind::LInf}) {
    for (const LevelData& l : level_elements(chain, geo, 1, 3, Subspace::full(5), k)) {
      const double d = geo.value(l.j - 1);
      CHECK(l.u == doctest::Approx(1.0 + geo.tail(2) / (std::ldexp(1.0, static_cast<int>(l.j)) * d)));
      CHECK(oracle::norm(l.q, k) == doctest::Approx(l.u).epsilon(1e-9));
      CHECK(oracle::exact_distance(l.q, chain[l.j - 1].basis(), k) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(l.f(l.q) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(oracle::dual_norm(l.f.coeffs, k) <= 1.0 + 1e-9);
    }
  }
  CHECK_THROWS_AS(level_elements(chain, DeviationSequence::explicit_values({1.0, 0.5, 0.0}, 0.0), 1, 3,
                                 Subspace::full(5), NormKind::L2),
                  Error);
}

TEST_CASE("single-level sweep") {
  const Chain chain = coordinate_chain({1}, 2);
  const auto seq = DeviationSequence::geometric(1.0, 0.5, 1);
  const auto levels = level_elements(chain, seq, 1, 1, Subspace::full(2), NormKind::L2);
  const SweepState s = backward_sweep(chain, levels, seq, NormKind::L2);
  CHECK(s.lambdas[0] == doctest::Approx(0.5));
  CHECK(distance(s.partial, chain[0], NormKind::L2).rho == doctest::Approx(0.5));
}

TEST_CASE("exact constructions against the enumeration oracle") {
  const Chain chain = coordinate_chain({1, 2, 3}, 5);
  for (NormKind k : {NormKind::L1, NormKind::L2, NormKind::LInf}) {
    for (double ratio : {0.5, 1.0 / 3.0}) {
      const auto seq = DeviationSequence::geometric(1.0, ratio, 3);
      const ExactResult r = construct_exact(chain, seq, k);
      CHECK(r.pass);
      check_rows_exact(r.x, chain, seq, k);
    }
  }
}

TEST_CASE("zero tail and head reductions") {
  const Chain chain = coordinate_chain({1, 2, 3, 4}, 6);
  for (NormKind k : {NormKind::L1, NormKind::L2, NormKind::LInf}) {
    const auto zero = DeviationSequence::explicit_values({1.0, 0.5, 0.0, 0.0}, 0.0);
    const ExactResult r = construct_exact(chain, zero, k);
    CHECK(r.pass);
    CHECK(member(r.x, chain[2]));
    check_rows_exact(r.x, chain, zero, k);

    const auto head = DeviationSequence::explicit_values({1.0, 0.6, 0.5, 0.25}, 0.0);
    const ExactResult h = construct_exact(chain, head, k);
    CHECK(h.plan.head_fix);
    CHECK(h.pass);
    check_rows_exact(h.x, chain, head, k);

    const Chain origin = coordinate_chain({0, 1, 2}, 4);
    const auto geo = DeviationSequence::geometric(1.0, 0.5, 3);
    const ExactResult o = construct_exact(origin, geo, k);
    CHECK(o.pass);
    check_rows_exact(o.x, origin, geo, k);
  }
}

TEST_CASE("random nested chains") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    const NormKind k = oracle::norm_at(static_cast<std::size_t>(trial));
    const Matrix g = oracle::gaussian(rng, 7, 7);
    Chain chain;
    chain.ambient_dim = 7;
    for (Index r : {1, 2, 4, 5}) chain.subspaces.emplace_back(oracle::columns(g, r), 7);
    const auto seq = DeviationSequence::geometric(1.0 + trial, trial % 2 ? 0.5 : 0.3, 4);
    const ExactResult r = construct_exact(chain, seq, k);
    CHECK(r.pass);
    for (std::size_t n = 0; n < 4; ++n) {
      CHECK(oracle::exact_distance(r.x, g.leftCols(chain[n].rank()), k) ==
            doctest::Approx(seq.value(n)).epsilon(1e-7));
    }
  }
}

TEST_CASE("convergence probe") {
  const Chain chain = coordinate_chain(iota(1, 8), 10);
  const auto seq = DeviationSequence::geometric(1.0, 0.5, 8);
  const std::vector<std::size_t> ns{4, 6, 8};
  for (NormKind k : {NormKind::L1, NormKind::L2, NormKind::LInf}) {
    const ConvergenceTable t = convergence_probe(chain, seq, ns, k);
    CHECK(t.entries.size() == 3);
    CHECK(t.non_increasing);
    for (const ConvergenceEntry& e : t.entries) {
      const auto a = std::find(ns.begin(), ns.end(), e.m) - ns.begin();
      const auto b = std::find(ns.begin(), ns.end(), e.n) - ns.begin();
      CHECK(e.distance == doctest::Approx(oracle::norm(t.points[a] - t.points[b], k)));
    }
  }
  const std::vector<std::size_t> same{5, 5};
  CHECK(convergence_probe(chain, seq, same, NormKind::L2).entries.at(0).distance == 0.0);
  const std::vector<std::size_t> one{2};
  CHECK(convergence_probe(chain, seq, one, NormKind::L2).entries.empty());
}
