#pragma once

#include "lethargy/space.hpp"

namespace lethargy {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  Vector x;
  int pivots = 0;
};

struct LpOptions {
  double tolerance = 1e-11;
  /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
  int degenerate_limit = 40;
  int max_pivots = 20000;
};

/// Dense two-phase tableau simplex for
///
///     maximize c^T x   subject to   A x <= b,  x >= 0.
///
/// Rows with negative right-hand side get an artificial variable and are
/// handled by a phase-one pass. Pricing is Dantzig's rule with a permanent
/// fallback to Bland's rule after a run of degenerate pivots, so the method
/// terminates on the highly degenerate problems produced by polyhedral norms.
/// The final basic solution is re-solved against the original data to wash
/// out round-off accumulated in the tableau.
LpResult solve_lp(const Matrix& A, const Vector& b, const Vector& c, const LpOptions& options);
/// Same with the calling thread's default options.
LpResult solve_lp(const Matrix& A, const Vector& b, const Vector& c);

/// Options used by solve_lp calls that do not pass their own, per thread.
const LpOptions& default_lp_options();

/// Overrides the calling thread's default pivot tolerance for its lifetime.
class ScopedLpTolerance {
 public:
  explicit ScopedLpTolerance(double tolerance);
  ~ScopedLpTolerance();
  ScopedLpTolerance(const ScopedLpTolerance&) = delete;
  ScopedLpTolerance& operator=(const ScopedLpTolerance&) = delete;

 private:
  double saved_;
};

}  // namespace lethargy
