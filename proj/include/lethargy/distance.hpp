#pragma once

#include "lethargy/space.hpp"

namespace lethargy {

double norm_of(const Vector& p, NormKind kind);
/// Norm of a functional (given by its coefficient vector) in the dual of the
/// space normed by `primal`.
double dual_norm_of(const Vector& coeffs, NormKind primal);

/// Linear functional f(x) = <coeffs, x> on (R^D, primal norm).
struct Functional {
  Vector coeffs;
  NormKind norm_kind = NormKind::L2;
  double dual_norm_value = 0.0;

  double operator()(const Vector& x) const { return coeffs.dot(x); }
};

Functional make_functional(Vector coeffs, NormKind primal);

struct DistanceResult {
  double rho = 0.0;
  /// Best approximation of x in Y.
  Vector minimizer;
};

/// rho(x, Y) = min_{a in Y} ||x - a||.
///
/// L2 is an orthogonal projection. L1 and LINF are solved exactly as linear
/// programs over the coefficients of an orthonormal basis of Y; rho is always
/// re-evaluated as ||x - minimizer|| so it is an attained value, not a solver
/// estimate. Throws SolverFailure if the program does not reach optimality.
DistanceResult distance(const Vector& x, const Subspace& Y, NormKind kind);

/// Nearest point only; shorthand used by the constructions.
inline Vector nearest_point(const Vector& x, const Subspace& Y, NormKind kind) {
  return distance(x, Y, kind).minimizer;
}

/// A functional f vanishing on Y with dual norm <= 1 and f(x) = rho(x, Y).
///
/// Computed from the dual program (maximize f(x) over the dual unit ball
/// intersected with the annihilator of Y), then projected back onto the
/// annihilator and rescaled so the dual-norm bound holds exactly.
/// Throws PointInsideSubspace when rho(x, Y) is negligible.
Functional norming_functional(const Vector& x, const Subspace& Y, NormKind kind);

/// Primal/dual witness for a claimed distance.
struct DistanceCertificate {
  double upper = 0.0;  ///< ||x - a|| for a feasible a in Y
  double lower = 0.0;  ///< f(x) for f with f|Y = 0 and dual norm <= 1
  double gap = 0.0;
};

struct CertifiedDistance {
  DistanceCertificate certificate;
  bool pass = false;
};

inline constexpr double kCertifyTolerance = 1e-8;

/// Fresh two-sided bounds on rho(x, Y); never reuses solver state.
DistanceCertificate certify(const Vector& x, const Subspace& Y, NormKind kind);

/// Passes iff lower >= claimed - tol and upper <= claimed + tol.
CertifiedDistance certify_distance(const Vector& x, const Subspace& Y, NormKind kind, double claimed,
                                   double tol = kCertifyTolerance);

}  // namespace lethargy
