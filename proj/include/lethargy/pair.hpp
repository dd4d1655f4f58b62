#pragma once

#include "lethargy/bisect.hpp"
#include "lethargy/distance.hpp"
#include "lethargy/space.hpp"

#include <utility>
#include <vector>

namespace lethargy {

struct PairOptions {
  double eps = 0.0;
  double root_tol = kRootTolerance;
  double certify_tol = kCertifyTolerance;
  int delta_grid = 256;
};

/// Q1 < Q2 < Q3 with a pivot z (rho(z,Q1) = 2, rho(z,Q2) = 1), an offset w in
/// Q2 with ||z - w|| = 1 + eps, the bracket for the largest root of
/// rho(z - a w, Q1) = 1 + eps, and the generators used to build elements with
/// two prescribed distances.
struct PairContext {
  Subspace q1;
  Subspace q2;
  Subspace q3;
  NormKind kind = NormKind::L2;
  Vector z{};
  Vector w{};
  double eps = 0.0;
  double delta_min = 0.0;
  double delta_max = 0.0;
  double delta = 0.0;
  /// (z - nearest point of z in Q2) / rho(z, Q2): unit norm, distance 1 to Q2.
  Vector s{};
  /// Unit-distance direction of Q2 off Q1.
  Vector t{};
  double lipschitz_c = 1.0;
  double root_tol = kRootTolerance;
  double certify_tol = kCertifyTolerance;
};

struct LevelElement {
  Vector q;
  double u = 0.0;
  double v = 0.0;
  double mu = 0.0;
};

struct DeltaSearch {
  double delta_min = 0.0;
  double delta_max = 0.0;
  double delta = 0.0;
};

/// z in Q3 with certified rho(z, Q1) = 2 and rho(z, Q2) = 1, via the finite
/// chain construction on {Q1, Q2}. Throws InvalidArgument unless
/// Q1 < Q2 < Q3 strictly.
Vector find_pivot(const Subspace& q1, const Subspace& q2, const Subspace& q3, NormKind kind);

/// Largest a in [delta_min, delta_max] with rho(z - a w, Q1) = 1 + eps.
///
/// The interval is scanned on a uniform grid from the right; the last grid
/// point at or below the level is refined by bisection against its right
/// neighbour. A tangency that the grid only touches within tolerance is
/// resolved by a golden-section minimisation around it.
DeltaSearch find_delta(const Vector& z, const Vector& w, const Subspace& q1, double eps, NormKind kind,
                       const PairOptions& options = {});

PairContext make_pair_context(const Subspace& q1, const Subspace& q2, const Subspace& q3, NormKind kind,
                              const PairOptions& options = {});

/// q = v s + mu t with mu >= 0 the smallest root of rho(q, Q1) = u; then
/// rho(q, Q1) = u and rho(q, Q2) = v, both certified.
/// Throws DegenerateTarget unless u > v >= 0.
LevelElement two_level_element(const PairContext& ctx, double u, double v);

struct PairFamily {
  PairContext context;
  std::vector<LevelElement> elements;
};

/// One element per (u_m, v_m); records in context.lipschitz_c the smallest
/// c >= 1 with ||q_m - q_n|| <= c (max{u_m,u_n} - min{v_m,v_n}).
PairFamily pair_family(const Subspace& q1, const Subspace& q2, const Subspace& q3,
                       const std::vector<std::pair<double, double>>& pairs, NormKind kind,
                       const PairOptions& options = {});

enum class Orientation { Minus, Plus };

std::string_view to_string(Orientation o);
Orientation parse_orientation(std::string_view tag);

/// Measurement of the prescribed-value extension: is there f with f|Q = 0,
/// f(x1) = 1, f(x2) = nu and dual norm 1/rho(x1, Q)?
struct FunctionalProbe {
  Vector x1;
  Vector x2;
  NormKind kind = NormKind::L2;
  double delta = 0.0;
  Orientation orientation = Orientation::Minus;
  /// delta - rho(x2 - delta x1, Q)/rho(x1, Q), or the mirrored value.
  double nu = 0.0;
  double required_norm = 0.0;
  /// Minimum dual norm under f|Q = 0, f(x1) = 1, f(x2) = nu.
  double achieved_norm = 0.0;
  /// Value of the dual program of that minimisation; equals achieved_norm.
  double dual_bound = 0.0;
  Vector functional;
  double margin = 0.0;
  bool feasible = false;
  /// Range of f(x2) over functionals with f|Q = 0, f(x1) = 1 and dual norm
  /// equal to required_norm. nu must lie here for the extension to exist.
  double forced_low = 0.0;
  double forced_high = 0.0;
  bool nu_in_forced_range = false;
};

/// Never throws on infeasibility; PreconditionViolation only when x1, x2, Q
/// or delta do not meet the hypotheses (including the minimality of delta,
/// sampled on [delta, delta + 10]).
FunctionalProbe prescribed_functional_probe(const Vector& x1, const Vector& x2, const Subspace& q,
                                            double delta, Orientation orientation, NormKind kind);

}  // namespace lethargy
