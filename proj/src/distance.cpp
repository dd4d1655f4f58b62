#include "lethargy/distance.hpp"

#include "lethargy/error.hpp"
#include "lethargy/simplex.hpp"

#include <cmath>
#include <string>

namespace lethargy {

double norm_of(const Vector& p, NormKind kind) {
  switch (kind) {
    case NormKind::L1: return p.lpNorm<1>();
    case NormKind::L2: return p.norm();
    case NormKind::LInf: return p.size() == 0 ? 0.0 : p.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

double dual_norm_of(const Vector& coeffs, NormKind primal) { return norm_of(coeffs, dual_of(primal)); }

Functional make_functional(Vector coeffs, NormKind primal) {
  const double n = dual_norm_of(coeffs, primal);
  return Functional{std::move(coeffs), primal, n};
}

namespace {

void check_dims(const Vector& x, const Subspace& Y) {
  if (x.size() != Y.ambient_dim()) {
    throw Error(ErrorKind::DimMismatch, "point has dimension " + std::to_string(x.size()) +
                                            ", subspace lives in R^" + std::to_string(Y.ambient_dim()));
  }
  if (!x.allFinite()) throw Error(ErrorKind::InvalidArgument, "point has non-finite entries");
}

[[noreturn]] void solver_failure(const char* what, LpStatus status) {
  throw Error(ErrorKind::SolverFailure,
              std::string(what) + " did not reach optimality (status " +
                  std::to_string(static_cast<int>(status)) + ")");
}

// Coefficients c minimizing ||x - U c|| for a polyhedral norm, with x already
// scaled to unit max-norm.
//
// Variables are [c+ (r), c- (r), slack block]. For LINF the slack block is a
// single bound t with |x_i - (Uc)_i| <= t; for L1 it is one bound per
// coordinate.
Vector polyhedral_coefficients(const Vector& x, const Matrix& U, NormKind kind) {
  const Index D = x.size();
  const Index r = U.cols();
  const Index slack = kind == NormKind::LInf ? 1 : D;
  const Index n = 2 * r + slack;
  Matrix A = Matrix::Zero(2 * D, n);
  Vector b(2 * D);
  Vector c = Vector::Zero(n);
  c.tail(slack).setConstant(-1.0);
  for (Index i = 0; i < D; ++i) {
    const Index s = kind == NormKind::LInf ? 2 * r : 2 * r + i;
    // x_i - (Uc)_i <= s
    A.row(i).head(r) = -U.row(i);
    A.row(i).segment(r, r) = U.row(i);
    A(i, s) = -1.0;
    b(i) = -x(i);
    // (Uc)_i - x_i <= s
    A.row(D + i).head(r) = U.row(i);
    A.row(D + i).segment(r, r) = -U.row(i);
    A(D + i, s) = -1.0;
    b(D + i) = x(i);
  }
  const LpResult lp = solve_lp(A, b, c);
  if (lp.status != LpStatus::Optimal) solver_failure("best-approximation program", lp.status);
  return lp.x.head(r) - lp.x.segment(r, r);
}

// Coefficients of f maximizing f(x) over {f : U^T f = 0, ||f||_* <= 1}.
// Variables are [f+ (D), f- (D)].
Vector polyhedral_dual(const Vector& x, const Matrix& U, NormKind kind) {
  const Index D = x.size();
  const Index r = U.cols();
  const Index bound_rows = kind == NormKind::LInf ? 1 : 2 * D;
  Matrix A = Matrix::Zero(bound_rows + 2 * r, 2 * D);
  Vector b = Vector::Zero(bound_rows + 2 * r);
  if (kind == NormKind::LInf) {
    // dual norm L1: sum (f+ + f-) <= 1
    A.row(0).setOnes();
    b(0) = 1.0;
  } else {
    // dual norm LINF: f+_i <= 1, f-_i <= 1
    A.topLeftCorner(2 * D, 2 * D).setIdentity();
    b.head(2 * D).setOnes();
  }
  A.block(bound_rows, 0, r, D) = U.transpose();
  A.block(bound_rows, D, r, D) = -U.transpose();
  A.block(bound_rows + r, 0, r, D) = -U.transpose();
  A.block(bound_rows + r, D, r, D) = U.transpose();
  Vector c(2 * D);
  c.head(D) = x;
  c.tail(D) = -x;
  const LpResult lp = solve_lp(A, b, c);
  if (lp.status != LpStatus::Optimal) solver_failure("dual program", lp.status);
  return lp.x.head(D) - lp.x.tail(D);
}

}  // namespace

DistanceResult distance(const Vector& x, const Subspace& Y, NormKind kind) {
  check_dims(x, Y);
  DistanceResult result;
  if (Y.is_zero()) {
    result.minimizer = Vector::Zero(x.size());
    result.rho = norm_of(x, kind);
    return result;
  }
  if (kind == NormKind::L2) {
    result.minimizer = Y.project(x);
  } else {
    const double scale = norm_of(x, NormKind::LInf);
    if (scale == 0.0) {
      result.minimizer = Vector::Zero(x.size());
      result.rho = 0.0;
      return result;
    }
    const Matrix& U = Y.orthonormal();
    result.minimizer = scale * (U * polyhedral_coefficients(x / scale, U, kind));
  }
  result.rho = norm_of(x - result.minimizer, kind);
  return result;
}

Functional norming_functional(const Vector& x, const Subspace& Y, NormKind kind) {
  check_dims(x, Y);
  const double scale = norm_of(x, NormKind::LInf);
  const double rho = distance(x, Y, kind).rho;
  if (scale == 0.0 || rho <= 1e-12 * scale) {
    throw Error(ErrorKind::PointInsideSubspace, "rho(x, Y) = " + std::to_string(rho) +
                                                    " is negligible; no norming functional");
  }
  Vector f;
  if (kind == NormKind::L2) {
    f = x - Y.project(x);
  } else {
    f = polyhedral_dual(x / scale, Y.orthonormal(), kind);
  }
  // Enforce exact annihilation of Y, then the dual-norm bound.
  f -= Y.project(f);
  const double n = dual_norm_of(f, kind);
  if (!(n > 0.0)) {
    throw Error(ErrorKind::SolverFailure, "dual program returned a vanishing functional");
  }
  if (kind == NormKind::L2 || n > 1.0) f /= n;
  return make_functional(std::move(f), kind);
}

DistanceCertificate certify(const Vector& x, const Subspace& Y, NormKind kind) {
  DistanceCertificate cert;
  cert.upper = distance(x, Y, kind).rho;
  try {
    cert.lower = norming_functional(x, Y, kind)(x);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::PointInsideSubspace) throw;
    cert.lower = 0.0;
  }
  cert.gap = cert.upper - cert.lower;
  return cert;
}

CertifiedDistance certify_distance(const Vector& x, const Subspace& Y, NormKind kind, double claimed,
                                   double tol) {
  CertifiedDistance out;
  out.certificate = certify(x, Y, kind);
  out.pass = out.certificate.lower >= claimed - tol && out.certificate.upper <= claimed + tol;
  return out;
}

}  // namespace lethargy
