#pragma once

#include "lethargy/bisect.hpp"
#include "lethargy/distance.hpp"
#include "lethargy/pair.hpp"
#include "lethargy/space.hpp"

#include <optional>
#include <span>
#include <vector>

namespace lethargy {

struct EngineOptions {
  double root_tol = kRootTolerance;
  double certify_tol = kCertifyTolerance;
  /// Relative acceptance band |rho - d_n| <= accept * d_n of the final rows.
  double accept_tol = 1e-6;
  /// Relative slack of the tail condition d_n >= tau_n.
  double tail_tol = 1e-12;
};

/// How a chain/sequence pair is reduced to the core case handled by the sweep.
/// Indices are 1-based.
struct ReductionPlan {
  std::size_t size = 0;
  /// First index with d_n = 0; the problem is solved inside Y_{zero_from}.
  std::optional<std::size_t> zero_from;
  /// Last index solved by the sweep (size, or zero_from - 1).
  std::size_t last = 0;
  /// Smallest n0 with d_n >= tau_n for n0 <= n <= last.
  std::size_t n0 = 1;
  /// Y_1 = {0} pushes the sweep start to 2.
  bool zero_first_subspace = false;
  /// First index handled by the sweep.
  std::size_t start = 1;
  /// Indices 1..start-1 are fixed afterwards by the finite-chain construction.
  bool head_fix = false;

  bool trivial() const { return start == 1 && !zero_from; }
};

/// Throws NoAdmissibleStart (tail condition fails even at the last index) or
/// HeadTies (a head that must be fixed is not strictly decreasing).
ReductionPlan preprocess(const Chain& chain, const DeviationSequence& seq, double tail_tol = 1e-12);

struct LevelData {
  /// 1-based level index.
  std::size_t j = 0;
  Vector q;
  double u = 0.0;
  Functional f;
};

/// Level elements for indices first..last (1-based, inclusive) with
/// Q1 = {0}, Q2 = Y_j, Q3 = Y_{j+1} (or `outer` for the last one) and
/// ||q_j|| = 1 + tau_last / (2^j d_j), rho(q_j, Y_j) = 1.
std::vector<LevelData> level_elements(const Chain& chain, const DeviationSequence& seq, std::size_t first,
                                      std::size_t last, const Subspace& outer, NormKind kind,
                                      const EngineOptions& options = {});

struct SweepState {
  /// 1-based level the sweep stopped at.
  std::size_t k = 0;
  /// lambdas[i] belongs to levels[i].
  std::vector<double> lambdas;
  Vector partial;
};

/// lambda_last = d_last, then each lower lambda_k is bisected in [0, d_k] or
/// [-d_k, 0] (sign from f_k at the running sum) so that the distance to Y_k
/// lands on d_k. Throws BracketFailure if a bracket end breaks its bound.
SweepState backward_sweep(const Chain& chain, const std::vector<LevelData>& levels,
                          const DeviationSequence& seq, NormKind kind, const EngineOptions& options = {});

/// One line of a report: the claimed value d_n, the measured distance, a fresh
/// certificate and the acceptance band [target_lo, target_hi].
struct ReportRow {
  std::size_t n = 0;
  double d = 0.0;
  double rho = 0.0;
  double cert_lower = 0.0;
  double cert_upper = 0.0;
  /// rho / d_n, or 0 when d_n = 0.
  double ratio = 0.0;
  double target_lo = 0.0;
  double target_hi = 0.0;
  bool pass = false;
};

ReportRow certify_row(const Vector& x, const Subspace& y, std::size_t n, double d, double target_lo,
                      double target_hi, NormKind kind);

struct ExactResult {
  Vector x;
  ReductionPlan plan;
  std::vector<LevelData> levels;
  std::vector<double> lambdas;
  /// Output of the sweep before the head fix.
  Vector tail_point;
  std::vector<ReportRow> rows;
  bool pass = false;
};

/// x with rho(x, Y_n) = d_n for every n of the chain. The last level element
/// lives in `outer` (the whole space by default).
ExactResult construct_exact(const Chain& chain, const DeviationSequence& seq, NormKind kind,
                            const EngineOptions& options = {});
ExactResult construct_exact(const Chain& chain, const DeviationSequence& seq, const Subspace& outer,
                            NormKind kind, const EngineOptions& options = {});

struct ConvergenceEntry {
  std::size_t m = 0;
  std::size_t n = 0;
  double distance = 0.0;
  /// c * tau_m * (1 - 2^-m)
  double tail_component = 0.0;
  /// d_{m-1}, or 0 for m = 1.
  double head_component = 0.0;
};

struct ConvergenceTable {
  std::vector<std::size_t> ns;
  /// x_{n,n} for each entry of ns.
  std::vector<Vector> points;
  std::vector<ConvergenceEntry> entries;
  /// Largest ||q_{j,m} - q_{j,n}|| / (max u - 1) over shared levels (at least 1).
  double c = 1.0;
  /// Largest distance for each value of min(m, n) never increases.
  bool non_increasing = true;
};

/// Solves the truncations 1..n (inside Y_{n+1}) for each n in ns and tabulates
/// pairwise distances of the results.
ConvergenceTable convergence_probe(const Chain& chain, const DeviationSequence& seq,
                                   std::span<const std::size_t> ns, NormKind kind,
                                   const EngineOptions& options = {});

}  // namespace lethargy
