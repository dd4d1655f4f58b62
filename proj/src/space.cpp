#include "lethargy/space.hpp"

#include "lethargy/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lethargy {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::NonIncreasingDims: return "NonIncreasingDims";
    case ErrorKind::DimExceedsAmbient: return "DimExceedsAmbient";
    case ErrorKind::LinearlyDependentBasis: return "LinearlyDependentBasis";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::PointInsideSubspace: return "PointInsideSubspace";
    case ErrorKind::NotStrictlyDecreasing: return "NotStrictlyDecreasing";
    case ErrorKind::AnchorInsideTop: return "AnchorInsideTop";
    case ErrorKind::CertificationFailure: return "CertificationFailure";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::DegenerateTarget: return "DegenerateTarget";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::HeadTies: return "HeadTies";
    case ErrorKind::NoAdmissibleStart: return "NoAdmissibleStart";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::InsufficientGaps: return "InsufficientGaps";
    case ErrorKind::BaseTooSmall: return "BaseTooSmall";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::CrossFieldError: return "CrossFieldError";
    case ErrorKind::TamperDetected: return "TamperDetected";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L1: return "L1";
    case NormKind::L2: return "L2";
    case NormKind::LInf: return "LINF";
  }
  return "?";
}

NormKind parse_norm(std::string_view tag) {
  if (tag == "L1") return NormKind::L1;
  if (tag == "L2") return NormKind::L2;
  if (tag == "LINF") return NormKind::LInf;
  throw Error(ErrorKind::InvalidArgument, "unknown norm tag '" + std::string(tag) + "'");
}

NormKind dual_of(NormKind kind) {
  switch (kind) {
    case NormKind::L1: return NormKind::LInf;
    case NormKind::L2: return NormKind::L2;
    case NormKind::LInf: return NormKind::L1;
  }
  return kind;
}

namespace {

// Gauss-Jordan elimination with partial pivoting on the rows of m.
// Returns the nonzero rows of the reduced form.
Matrix row_reduce(Matrix m) {
  const Index rows = m.rows();
  const Index cols = m.cols();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  Index pivot_row = 0;
  for (Index col = 0; col < cols && pivot_row < rows; ++col) {
    Index best = pivot_row;
    for (Index r = pivot_row + 1; r < rows; ++r) {
      if (std::abs(m(r, col)) > std::abs(m(best, col))) best = r;
    }
    if (std::abs(m(best, col)) <= kPivotTolerance * scale) {
      m.block(pivot_row, col, rows - pivot_row, 1).setZero();
      continue;
    }
    m.row(pivot_row).swap(m.row(best));
    m.row(pivot_row) /= m(pivot_row, col);
    m(pivot_row, col) = 1.0;
    for (Index r = 0; r < rows; ++r) {
      if (r == pivot_row) continue;
      const double factor = m(r, col);
      if (factor != 0.0) {
        m.row(r) -= factor * m.row(pivot_row);
        m(r, col) = 0.0;
      }
    }
    ++pivot_row;
  }
  return m.topRows(pivot_row);
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " has non-finite entries");
  }
}

}  // namespace

Subspace::Subspace(Index ambient_dim)
    : ambient_dim_(ambient_dim),
      basis_(ambient_dim, 0),
      canonical_(0, ambient_dim),
      orthonormal_(ambient_dim, 0) {
  if (ambient_dim <= 0) {
    throw Error(ErrorKind::InvalidArgument, "ambient dimension must be positive");
  }
}

Subspace::Subspace(const std::vector<Vector>& basis, Index ambient_dim) : Subspace(ambient_dim) {
  if (basis.empty()) return;
  basis_.resize(ambient_dim, static_cast<Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].size() != ambient_dim) {
      throw Error(ErrorKind::DimMismatch, "basis vector " + std::to_string(i) + " has dimension " +
                                              std::to_string(basis[i].size()) + ", expected " +
                                              std::to_string(ambient_dim));
    }
    require_finite(basis[i], "basis vector");
    basis_.col(static_cast<Index>(i)) = basis[i];
  }
  canonical_ = row_reduce(basis_.transpose());
  if (canonical_.rows() != basis_.cols()) {
    throw Error(ErrorKind::LinearlyDependentBasis,
                "basis of " + std::to_string(basis_.cols()) + " vectors has rank " +
                    std::to_string(canonical_.rows()));
  }
  Eigen::HouseholderQR<Matrix> qr(canonical_.transpose());
  orthonormal_ = qr.householderQ() * Matrix::Identity(ambient_dim, canonical_.rows());
}

Subspace Subspace::full(Index ambient_dim) { return coordinate(ambient_dim, ambient_dim); }

Subspace Subspace::coordinate(Index rank, Index ambient_dim) {
  if (rank < 0 || rank > ambient_dim) {
    throw Error(ErrorKind::DimExceedsAmbient, "coordinate rank " + std::to_string(rank) +
                                                  " outside [0, " + std::to_string(ambient_dim) + "]");
  }
  std::vector<Vector> basis;
  for (Index i = 0; i < rank; ++i) basis.push_back(Vector::Unit(ambient_dim, i));
  return Subspace(basis, ambient_dim);
}

Vector Subspace::project(const Vector& p) const {
  if (p.size() != ambient_dim_) {
    throw Error(ErrorKind::DimMismatch, "point dimension " + std::to_string(p.size()) +
                                            " vs ambient " + std::to_string(ambient_dim_));
  }
  if (is_zero()) return Vector::Zero(ambient_dim_);
  // Two passes of classical Gram-Schmidt projection keep the residual
  // orthogonal to working precision.
  Vector proj = orthonormal_ * (orthonormal_.transpose() * p);
  const Vector r = p - proj;
  proj += orthonormal_ * (orthonormal_.transpose() * r);
  return proj;
}

double Subspace::residual(const Vector& p) const { return (p - project(p)).norm(); }

bool member(const Vector& p, const Subspace& s, double tol) {
  if (p.size() != s.ambient_dim()) {
    throw Error(ErrorKind::DimMismatch, "point dimension " + std::to_string(p.size()) +
                                            " vs ambient " + std::to_string(s.ambient_dim()));
  }
  return s.residual(p) <= tol;
}

bool strictly_nested(const Subspace& inner, const Subspace& outer) {
  if (inner.ambient_dim() != outer.ambient_dim() || inner.rank() >= outer.rank()) return false;
  for (Index g = 0; g < inner.rank(); ++g) {
    if (!member(inner.generator(g), outer, kPivotTolerance)) return false;
  }
  return true;
}

Vector first_generator_outside(const Subspace& outer, const Subspace& inner) {
  for (Index g = 0; g < outer.rank(); ++g) {
    Vector v = outer.generator(g);
    if (inner.residual(v) > kPivotTolerance * std::max(1.0, v.norm())) return v;
  }
  throw Error(ErrorKind::InvalidArgument, "subspace has no generator outside the inner subspace");
}

Subspace extend_within(const Subspace& inner, const Subspace& outer, Index rank) {
  std::vector<Vector> basis;
  for (Index i = 0; i < inner.rank(); ++i) basis.push_back(inner.generator(i));
  Subspace current = inner;
  for (Index g = 0; g < outer.rank() && current.rank() < rank; ++g) {
    Vector v = outer.generator(g);
    if (current.residual(v) > kPivotTolerance * std::max(1.0, v.norm())) {
      basis.push_back(std::move(v));
      current = Subspace(basis, inner.ambient_dim());
    }
  }
  if (current.rank() != rank) {
    throw Error(ErrorKind::InvalidArgument, "cannot extend to rank " + std::to_string(rank));
  }
  return current;
}

Subspace Chain::above(std::size_t i) const {
  if (i + 1 < subspaces.size()) return subspaces[i + 1];
  return Subspace::full(ambient_dim);
}

Chain Chain::slice(std::size_t first, std::size_t last) const {
  Chain out;
  out.ambient_dim = ambient_dim;
  out.subspaces.assign(subspaces.begin() + static_cast<std::ptrdiff_t>(first),
                       subspaces.begin() + static_cast<std::ptrdiff_t>(last));
  return out;
}

std::vector<Index> Chain::ranks() const {
  std::vector<Index> out;
  for (const auto& s : subspaces) out.push_back(s.rank());
  return out;
}

Chain coordinate_chain(std::span<const Index> dims, Index ambient_dim) {
  Chain chain;
  chain.ambient_dim = ambient_dim;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 0 || (i > 0 && dims[i] <= dims[i - 1])) {
      throw Error(ErrorKind::NonIncreasingDims,
                  "dims must be non-negative and strictly increasing (position " +
                      std::to_string(i + 1) + ")");
    }
  }
  if (!dims.empty() && dims.back() >= ambient_dim) {
    throw Error(ErrorKind::DimExceedsAmbient, "largest dim " + std::to_string(dims.back()) +
                                                  " must be below ambient " +
                                                  std::to_string(ambient_dim));
  }
  for (Index d : dims) chain.subspaces.push_back(Subspace::coordinate(d, ambient_dim));
  return chain;
}

Chain coordinate_chain(std::initializer_list<Index> dims, Index ambient_dim) {
  return coordinate_chain(std::span<const Index>(dims.begin(), dims.size()), ambient_dim);
}

ChainDiagnostics validate_chain(const Chain& chain) {
  ChainDiagnostics diag;
  auto fail = [&](std::size_t a, std::size_t b, std::string msg) {
    diag.ok = false;
    diag.first = a;
    diag.second = b;
    diag.message = std::move(msg);
    return diag;
  };
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (chain[i].ambient_dim() != chain.ambient_dim) {
      return fail(i + 1, i + 1, "ambient dimension mismatch at Y_" + std::to_string(i + 1));
    }
  }
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const Subspace& lower = chain[i];
    const Subspace& upper = chain[i + 1];
    if (lower.rank() >= upper.rank()) {
      return fail(i + 1, i + 2,
                  "rank: Y_" + std::to_string(i + 1) + " has rank " + std::to_string(lower.rank()) +
                      ", Y_" + std::to_string(i + 2) + " has rank " + std::to_string(upper.rank()));
    }
    if (!strictly_nested(lower, upper)) {
      return fail(i + 1, i + 2,
                  "nesting: Y_" + std::to_string(i + 1) + " is not contained in Y_" +
                      std::to_string(i + 2));
    }
  }
  if (!chain.subspaces.empty() && chain.subspaces.back().rank() >= chain.ambient_dim) {
    return fail(chain.size(), chain.size(), "top subspace must be a proper subspace");
  }
  return diag;
}

void require_valid_chain(const Chain& chain) {
  const auto diag = validate_chain(chain);
  if (!diag.ok) throw Error(ErrorKind::InvalidArgument, "invalid chain: " + diag.message);
}

DeviationSequence::DeviationSequence(std::vector<double> values, std::vector<double> tails,
                                     TailKind kind)
    : values_(std::move(values)), tails_(std::move(tails)), kind_(kind) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      throw Error(ErrorKind::InvalidArgument,
                  "d_" + std::to_string(i + 1) + " must be finite and non-negative");
    }
    if (i > 0 && values_[i] > values_[i - 1]) {
      throw Error(ErrorKind::InvalidArgument,
                  "deviation sequence must be non-increasing (d_" + std::to_string(i + 1) +
                      " > d_" + std::to_string(i) + ")");
    }
  }
  if (!values_.empty()) {
    const double last_tail = tails_.back();
    if (std::isnan(last_tail) || last_tail < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "tail must be non-negative");
    }
    if (values_.back() == 0.0 && last_tail != 0.0) {
      throw Error(ErrorKind::InvalidArgument, "a sequence ending in 0 must have zero tail");
    }
  }
}

DeviationSequence DeviationSequence::geometric(double scale, double ratio, std::size_t length) {
  if (!(scale > 0.0) || !(ratio > 0.0) || !(ratio < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "geometric sequence needs scale > 0 and 0 < ratio < 1");
  }
  std::vector<double> values(length), tails(length);
  for (std::size_t i = 0; i < length; ++i) {
    values[i] = scale * std::pow(ratio, static_cast<double>(i + 1));
    tails[i] = values[i] * (ratio / (1.0 - ratio));
  }
  return DeviationSequence(std::move(values), std::move(tails), TailKind::Geometric);
}

namespace {

std::vector<double> backward_tails(const std::vector<double>& values, double last_tail) {
  std::vector<double> tails(values.size());
  if (values.empty()) return tails;
  tails.back() = last_tail;
  for (std::size_t i = values.size() - 1; i-- > 0;) tails[i] = values[i + 1] + tails[i + 1];
  return tails;
}

}  // namespace

DeviationSequence DeviationSequence::explicit_values(std::vector<double> values, double tail_value) {
  auto tails = backward_tails(values, tail_value);
  const auto kind = tail_value == 0.0 ? TailKind::Zero : TailKind::Explicit;
  return DeviationSequence(std::move(values), std::move(tails), kind);
}

DeviationSequence DeviationSequence::with_geometric_tail(std::vector<double> values, double ratio) {
  if (!(ratio > 0.0) || !(ratio < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "tail ratio must lie in (0, 1)");
  }
  const double last = values.empty() ? 0.0 : values.back();
  auto tails = backward_tails(values, last * (ratio / (1.0 - ratio)));
  return DeviationSequence(std::move(values), std::move(tails), TailKind::Geometric);
}

DeviationSequence DeviationSequence::power(double p, std::size_t length) {
  if (!(p > 0.0)) throw Error(ErrorKind::InvalidArgument, "power sequence needs p > 0");
  std::vector<double> values(length);
  for (std::size_t i = 0; i < length; ++i) values[i] = std::pow(static_cast<double>(i + 1), -p);
  double tail = std::numeric_limits<double>::infinity();
  if (p > 1.0) {
    // zeta(p, N+1) = zeta(p) - sum_{k<=N} k^{-p}; summed smallest-first.
    double head = 0.0;
    for (std::size_t i = length; i-- > 0;) head += values[i];
    tail = std::riemann_zeta(p) - head;
  }
  auto tails = backward_tails(values, tail);
  return DeviationSequence(std::move(values), std::move(tails), TailKind::Power);
}

DeviationSequence DeviationSequence::slice(std::size_t first, std::size_t last) const {
  std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(first),
                        values_.begin() + static_cast<std::ptrdiff_t>(last));
  std::vector<double> t(tails_.begin() + static_cast<std::ptrdiff_t>(first),
                        tails_.begin() + static_cast<std::ptrdiff_t>(last));
  return DeviationSequence(std::move(v), std::move(t), kind_);
}

std::optional<std::size_t> DeviationSequence::first_zero() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] == 0.0) return i;
  }
  return std::nullopt;
}

std::size_t check_tail_condition(const DeviationSequence& seq, double tol) {
  if (seq.empty()) throw Error(ErrorKind::NoAdmissibleStart, "empty sequence");
  std::size_t n0 = seq.size() + 1;
  for (std::size_t i = seq.size(); i-- > 0;) {
    const double d = seq.value(i);
    const double tau = seq.tail(i);
    if (d >= tau - tol * std::max(d, 1e-300)) {
      n0 = i + 1;
    } else {
      break;
    }
  }
  if (n0 > seq.size()) {
    std::ostringstream msg;
    msg << "d_N = " << seq.value(seq.size() - 1) << " < tau_N = " << seq.tail(seq.size() - 1);
    throw Error(ErrorKind::NoAdmissibleStart, msg.str());
  }
  return n0;
}

}  // namespace lethargy
