#pragma once

#include "lethargy/engine.hpp"
#include "lethargy/space.hpp"

#include <vector>

namespace lethargy {

/// One member g_i = K b^-i of the inserted geometric sequence.
struct ExtensionEntry {
  /// 1-based position in the geometric sequence.
  std::size_t i = 0;
  double g = 0.0;
  Index rank = 0;
  /// 1-based original index whose (d_n, Y_n) is reused, 0 for a fresh insert.
  std::size_t reused_from = 0;
};

/// Geometric sequence g_i = K b^-i (i = 1..I) threaded through an arbitrary
/// chain: each g_i either reuses an original (d_n, Y_n) with the same value or
/// is given a fresh coordinate subspace whose rank sits strictly between the
/// neighbouring original ranks.
struct ExtensionPlan {
  double K = 0.0;
  double b = 2.0;
  std::size_t i0 = 1;
  std::vector<ExtensionEntry> entries;
  Chain merged_chain;
  /// Geometric with closed-form tail g_i / (b - 1).
  DeviationSequence merged_seq = DeviationSequence::explicit_values({}, 0.0);
};

/// Throws BaseTooSmall for b < 2 and InsufficientGaps when a rank gap cannot
/// host its inserted values.
ExtensionPlan plan_extension(const Chain& chain, const DeviationSequence& seq, double b);

struct BoundedOptions {
  EngineOptions engine;
  /// Absolute slack on both sides of [c d_n, b^2 c d_n].
  double slack = 1e-6;
};

struct BoundedResult {
  /// Exact solution on the merged geometric problem.
  Vector x;
  /// (b c) x
  Vector x_c;
  double c = 1.0;
  double b = 2.0;
  ExtensionPlan plan;
  /// Rows of the original chain, banded by [c d_n, b^2 c d_n].
  std::vector<ReportRow> rows;
  /// rho(x, Y_n) / d_n before scaling; inside (1/b, b).
  std::vector<double> pre_ratios;
  /// Rows of the merged problem before scaling (equality band).
  std::vector<ReportRow> merged_rows;
  bool pass = false;
};

/// x_c with c d_n <= rho(x_c, Y_n) <= b^2 c d_n for every n.
///
/// An original value between two consecutive inserts g_i > d_n > g_{i+1} has
/// Z_i inside Y_n inside Z_{i+1}, hence g_{i+1} <= rho(x, Y_n) <= g_i and the
/// ratio rho / d_n lies in (1/b, b). Scaling by b c moves this into
/// (c, b^2 c). A reused index lands on b c d_n.
BoundedResult construct_bounded(const Chain& chain, const DeviationSequence& seq, double c, double b,
                                NormKind kind, const BoundedOptions& options = {});

struct HeadPerturbResult {
  Vector x;
  std::size_t n0 = 0;
  /// d'_n = (1 + (n0 - n) eps / n0) d_n for n <= n0.
  std::vector<double> perturbed;
  std::vector<ReportRow> rows;
  bool pass = false;
};

/// Finitely supported d (d_{n0} > 0 = d_{n0+1}) with possible ties: the
/// perturbed head is strictly decreasing and is realized by the finite-chain
/// construction inside Y_{n0+1}, so d_n <= rho(x, Y_n) <= (1 + eps) d_n.
HeadPerturbResult head_perturb(const Chain& chain, const DeviationSequence& seq, double eps, NormKind kind,
                               const BoundedOptions& options = {});

}  // namespace lethargy
