#pragma once

#include "lethargy/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace lethargy {

/// Relative tolerance on the function value at which a bracketed search stops.
inline constexpr double kRootTolerance = 1e-12;

/// Finds t in [lo, hi] with phi(t) = target, given phi(lo) <= target <= phi(hi)
/// up to the tolerance. phi need not be monotone; the search keeps the
/// invariant phi(lo) < target <= phi(hi) and returns the end point whose value
/// is closest to the target once the interval can no longer be halved.
///
/// A lower end already within tolerance is returned as is. An upper end below
/// the target by more than the tolerance violates the bracket and raises
/// `failure`.
template <class F>
double solve_crossing(F&& phi, double lo, double hi, double target, double rel_tol,
                      ErrorKind failure, const std::string& what) {
  const double tol = rel_tol * std::max(std::abs(target), 1e-300);
  const double f_lo = phi(lo);
  if (f_lo >= target - tol) {
    if (f_lo > target + tol) {
      std::ostringstream msg;
      msg << what << ": lower end value " << f_lo << " exceeds target " << target;
      throw Error(failure, msg.str());
    }
    return lo;
  }
  double f_hi = phi(hi);
  if (f_hi < target - tol) {
    std::ostringstream msg;
    msg << what << ": upper end value " << f_hi << " below target " << target;
    throw Error(failure, msg.str());
  }
  double best = hi;
  double best_err = std::abs(f_hi - target);
  for (int iter = 0; iter < 2000 && best_err > tol; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = phi(mid);
    if (std::abs(f_mid - target) < best_err) {
      best = mid;
      best_err = std::abs(f_mid - target);
    }
    if (f_mid < target) {
      lo = mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  return best;
}

/// Same as solve_crossing on [lo, infinity): the upper end starts at `hi` and
/// doubles until phi(hi) >= target.
template <class F>
double solve_crossing_expanding(F&& phi, double lo, double hi, double target, double rel_tol,
                                ErrorKind failure, const std::string& what) {
  for (int doubling = 0; doubling < 200 && phi(hi) < target; ++doubling) {
    lo = hi;
    hi *= 2.0;
  }
  return solve_crossing(phi, lo, hi, target, rel_tol, failure, what);
}

}  // namespace lethargy
