#pragma once

#include "lethargy/bisect.hpp"
#include "lethargy/distance.hpp"
#include "lethargy/space.hpp"

#include <span>

namespace lethargy {

struct FiniteOptions {
  double root_tol = kRootTolerance;
  /// Absolute certification tolerance, scaled by max(1, d_k).
  double certify_tol = kCertifyTolerance;
};

/// x with prescribed distances to a finite chain, tied to an anchor z by
/// x - lambda * z in Y_n.
struct AnchoredElement {
  Vector x;
  double lambda = 0.0;
  Vector anchor;
  /// Euclidean residual of x - lambda * anchor against the top subspace.
  double anchor_residual = 0.0;
};

/// Builds x with rho(x, Y_k) = d_k for k = 1..n and ||x|| = d_1.
///
/// Starts from (d_n / rho(z, Y_n)) z and walks down the chain: at level k the
/// current point is recentred in Y_{k+1} (so its norm is d_{k+1} < d_k), then
/// moved along a direction y_k in Y_{k+1} with rho(y_k, Y_k) = 1 until its
/// distance to Y_k reaches d_k. Every move stays inside Y_n, so the anchor
/// relation holds with lambda = d_n / rho(z, Y_n). For d_n = 0 this gives
/// lambda = 0.
///
/// Throws NotStrictlyDecreasing, AnchorInsideTop, or CertificationFailure.
AnchoredElement construct_finite(const Chain& chain, std::span<const double> d, const Vector& anchor,
                                 NormKind kind, const FiniteOptions& options = {});

/// Deterministic anchor: the first canonical generator of `outer` outside the
/// top of the chain.
Vector default_anchor(const Chain& chain, const Subspace& outer);

}  // namespace lethargy
