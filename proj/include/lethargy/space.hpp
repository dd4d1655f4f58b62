#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lethargy {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class NormKind { L1, L2, LInf };

std::string_view to_string(NormKind kind);
NormKind parse_norm(std::string_view tag);
/// Norm of the dual space: L1 <-> LInf, L2 <-> L2.
NormKind dual_of(NormKind kind);

/// Pivot tolerance used by the row-reduced canonical form.
inline constexpr double kPivotTolerance = 1e-10;

/// Linear subspace of R^D given by a linearly independent spanning set.
///
/// Besides the basis as supplied, a subspace keeps a row-reduced canonical
/// form (so that rank and nesting tests do not depend on how the basis was
/// presented) and an orthonormal basis of the same span used by the solvers.
/// The zero subspace is an empty basis.
class Subspace {
 public:
  explicit Subspace(Index ambient_dim);
  Subspace(const std::vector<Vector>& basis, Index ambient_dim);

  static Subspace zero(Index ambient_dim) { return Subspace(ambient_dim); }
  static Subspace full(Index ambient_dim);
  /// span{e_1, ..., e_rank}
  static Subspace coordinate(Index rank, Index ambient_dim);

  Index ambient_dim() const { return ambient_dim_; }
  Index rank() const { return basis_.cols(); }
  bool is_zero() const { return rank() == 0; }

  /// Basis vectors as columns (D x rank).
  const Matrix& basis() const { return basis_; }
  /// Row-reduced echelon form of the basis, one generator per row (rank x D).
  const Matrix& canonical() const { return canonical_; }
  /// Orthonormal basis of the same span as columns (D x rank).
  const Matrix& orthonormal() const { return orthonormal_; }

  /// i-th canonical generator as a column vector.
  Vector generator(Index i) const { return canonical_.row(i).transpose(); }

  /// Euclidean residual of p after orthogonal projection onto the span.
  double residual(const Vector& p) const;
  Vector project(const Vector& p) const;

 private:
  Index ambient_dim_;
  Matrix basis_;
  Matrix canonical_;
  Matrix orthonormal_;
};

/// True iff the canonical-form residual of p is at most tol.
bool member(const Vector& p, const Subspace& s, double tol = 1e-10);

/// inner is contained in outer and has strictly smaller rank.
bool strictly_nested(const Subspace& inner, const Subspace& outer);

/// First canonical generator of `outer` that does not lie in `inner`.
/// Throws InvalidArgument when outer is contained in inner.
Vector first_generator_outside(const Subspace& outer, const Subspace& inner);

/// span(inner) extended by canonical generators of `outer` (in order) until
/// the requested rank is reached.
Subspace extend_within(const Subspace& inner, const Subspace& outer, Index rank);

/// Nested sequence Y_1, ..., Y_N of subspaces of R^D (stored 0-based).
struct Chain {
  std::vector<Subspace> subspaces;
  Index ambient_dim = 0;

  std::size_t size() const { return subspaces.size(); }
  const Subspace& operator[](std::size_t i) const { return subspaces[i]; }
  /// Y_{i+1}, or the whole space past the last member.
  Subspace above(std::size_t i) const;
  /// Members [first, last) as a chain of their own.
  Chain slice(std::size_t first, std::size_t last) const;
  std::vector<Index> ranks() const;
};

/// Chain of coordinate subspaces span{e_1..e_{dims[n]}} in R^D.
Chain coordinate_chain(std::span<const Index> dims, Index ambient_dim);
Chain coordinate_chain(std::initializer_list<Index> dims, Index ambient_dim);

struct ChainDiagnostics {
  bool ok = true;
  /// 1-based indices of the first offending pair (0 when ok).
  std::size_t first = 0;
  std::size_t second = 0;
  std::string message;
};

ChainDiagnostics validate_chain(const Chain& chain);
/// Throws InvalidArgument carrying the diagnostic if the chain is invalid.
void require_valid_chain(const Chain& chain);

/// Target deviations d_1 >= d_2 >= ... >= d_N >= 0 together with the analytic
/// tails tau_j = sum_{k>j} d_k of the intended infinite continuation.
///
/// Tails are never obtained by truncated summation: the equality case
/// d_j = tau_j (ratio 1/2) has to survive exactly.
class DeviationSequence {
 public:
  enum class TailKind { Zero, Explicit, Geometric, Power };

  /// d_n = scale * ratio^n for n = 1..length; tails in closed form.
  static DeviationSequence geometric(double scale, double ratio, std::size_t length);
  /// Explicit values with tau_N = tail_value (0 for finitely supported).
  static DeviationSequence explicit_values(std::vector<double> values, double tail_value);
  /// Explicit values continued geometrically: d_{N+k} = d_N * ratio^k.
  static DeviationSequence with_geometric_tail(std::vector<double> values, double ratio);
  /// d_n = n^{-p}; the tail is the Hurwitz zeta remainder (infinite for p <= 1).
  static DeviationSequence power(double p, std::size_t length);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  /// 0-based: value(i) is d_{i+1}.
  double value(std::size_t i) const { return values_[i]; }
  /// 0-based: tail(i) is tau_{i+1} = sum of all values after index i.
  double tail(std::size_t i) const { return tails_[i]; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& tails() const { return tails_; }
  TailKind tail_kind() const { return kind_; }

  /// Entries [first, last) keeping the analytic tails of the full sequence.
  DeviationSequence slice(std::size_t first, std::size_t last) const;
  /// Index of the first zero value, if any.
  std::optional<std::size_t> first_zero() const;

 private:
  DeviationSequence(std::vector<double> values, std::vector<double> tails, TailKind kind);

  std::vector<double> values_;
  std::vector<double> tails_;
  TailKind kind_;
};

/// Smallest 1-based n0 such that d_n >= tau_n for every n >= n0 (relative
/// tolerance tol). Throws NoAdmissibleStart when even n = N fails.
std::size_t check_tail_condition(const DeviationSequence& seq, double tol = 1e-12);

}  // namespace lethargy
