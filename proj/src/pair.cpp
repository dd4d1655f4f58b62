#include "lethargy/pair.hpp"

#include "lethargy/error.hpp"
#include "lethargy/finite_chain.hpp"
#include "lethargy/simplex.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace lethargy {

namespace {

void require_strict_triple(const Subspace& q1, const Subspace& q2, const Subspace& q3) {
  if (!strictly_nested(q1, q2) || !strictly_nested(q2, q3)) {
    throw Error(ErrorKind::InvalidArgument, "strict nesting Q1 < Q2 < Q3 required");
  }
}

void require_certified(const Vector& x, const Subspace& y, NormKind kind, double claimed, double tol,
                       const char* what) {
  const auto cert = certify_distance(x, y, kind, claimed, tol * std::max(1.0, claimed));
  if (!cert.pass) {
    std::ostringstream msg;
    msg << what << ": certified range [" << cert.certificate.lower << ", " << cert.certificate.upper
        << "], expected " << claimed;
    throw Error(ErrorKind::CertificationFailure, msg.str());
  }
}

}  // namespace

Vector find_pivot(const Subspace& q1, const Subspace& q2, const Subspace& q3, NormKind kind) {
  require_strict_triple(q1, q2, q3);
  Chain chain;
  chain.ambient_dim = q3.ambient_dim();
  chain.subspaces = {q1, q2};
  const std::array<double, 2> targets{2.0, 1.0};
  return construct_finite(chain, targets, first_generator_outside(q3, q2), kind).x;
}

DeltaSearch find_delta(const Vector& z, const Vector& w, const Subspace& q1, double eps, NormKind kind,
                       const PairOptions& options) {
  const double rho_w = distance(w, q1, kind).rho;
  if (!(rho_w > 1e-12 * std::max(1.0, norm_of(w, kind)))) {
    throw Error(ErrorKind::PreconditionViolation, "rho(w, Q1) vanishes");
  }
  const double target = 1.0 + eps;
  if (std::abs(norm_of(z - w, kind) - target) > 1e-8 * target) {
    throw Error(ErrorKind::PreconditionViolation, "||z - w|| must equal 1 + eps");
  }
  const double rho_zw = distance(z - w, q1, kind).rho;

  DeltaSearch out;
  out.delta_min = 1.0 + (target - rho_zw) / rho_w;
  out.delta_max = (3.0 + eps) / rho_w;
  const double tol = options.root_tol * target;
  auto h = [&](double a) { return distance(z - a * w, q1, kind).rho; };

  if (h(out.delta_max) < target - tol) {
    throw Error(ErrorKind::NoBracket, "rho(z - delta_max w, Q1) below 1 + eps");
  }
  const int points = std::max(2, options.delta_grid);
  const double step = (out.delta_max - out.delta_min) / (points - 1);
  auto grid = [&](int i) { return i == points - 1 ? out.delta_max : out.delta_min + i * step; };

  int found = -1;
  double found_value = 0.0;
  for (int i = points - 1; i >= 0; --i) {
    const double value = h(grid(i));
    if (value <= target + tol) {
      found = i;
      found_value = value;
      break;
    }
  }
  if (found < 0) throw Error(ErrorKind::NoBracket, "no grid point reaches 1 + eps");

  if (found == points - 1 || step <= 0.0) {
    out.delta = grid(found);
  } else if (found_value <= target) {
    out.delta = solve_crossing(h, grid(found), grid(found + 1), target, options.root_tol,
                               ErrorKind::NoBracket, "delta search");
  } else {
    // Tangency: minimise h around the grid point (h is convex in a).
    double lo = grid(std::max(found - 1, 0));
    double hi = grid(found + 1);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - phi * (hi - lo);
    double b = lo + phi * (hi - lo);
    double fa = h(a);
    double fb = h(b);
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++iter) {
      if (fa <= fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - phi * (hi - lo);
        fa = h(a);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + phi * (hi - lo);
        fb = h(b);
      }
    }
    const double argmin = fa <= fb ? a : b;
    const double min_value = std::min(fa, fb);
    if (min_value < target) {
      out.delta = solve_crossing(h, argmin, grid(found + 1), target, options.root_tol,
                                 ErrorKind::NoBracket, "delta search");
    } else {
      out.delta = std::max(grid(found), argmin);
    }
  }
  if (std::abs(h(out.delta) - target) > std::max(tol, 1e-10 * target)) {
    throw Error(ErrorKind::NoBracket, "delta search did not land on 1 + eps");
  }
  return out;
}

PairContext make_pair_context(const Subspace& q1, const Subspace& q2, const Subspace& q3, NormKind kind,
                              const PairOptions& options) {
  if (!(options.eps >= 0.0 && options.eps < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "eps must lie in [0, 1)");
  }
  PairContext ctx{q1, q2, q3, kind};
  ctx.eps = options.eps;
  ctx.root_tol = options.root_tol;
  ctx.certify_tol = options.certify_tol;
  ctx.z = find_pivot(q1, q2, q3, kind);

  const DistanceResult to_q2 = distance(ctx.z, q2, kind);
  ctx.s = (ctx.z - to_q2.minimizer) / to_q2.rho;
  if (options.eps == 0.0) {
    ctx.w = to_q2.minimizer;
  } else {
    const Vector g = q2.generator(0);
    const Vector offset = ctx.z - to_q2.minimizer;
    auto phi = [&](double beta) { return norm_of(offset + beta * g, kind); };
    const double beta = solve_crossing_expanding(phi, 0.0, 1.0, 1.0 + options.eps, options.root_tol,
                                                 ErrorKind::NoBracket, "offset w");
    ctx.w = to_q2.minimizer - beta * g;
  }
  const DeltaSearch ds = find_delta(ctx.z, ctx.w, q1, options.eps, kind, options);
  ctx.delta_min = ds.delta_min;
  ctx.delta_max = ds.delta_max;
  ctx.delta = ds.delta;

  const Vector y = first_generator_outside(q2, q1);
  const DistanceResult to_q1 = distance(y, q1, kind);
  ctx.t = (y - to_q1.minimizer) / to_q1.rho;

  require_certified(ctx.z, q1, kind, 2.0, options.certify_tol, "rho(z, Q1)");
  require_certified(ctx.z, q2, kind, 1.0, options.certify_tol, "rho(z, Q2)");
  require_certified(ctx.s, q2, kind, 1.0, options.certify_tol, "rho(s, Q2)");
  require_certified(ctx.t, q1, kind, 1.0, options.certify_tol, "rho(t, Q1)");
  if (!member(ctx.t, q2, options.certify_tol) || !member(ctx.s, q3, options.certify_tol)) {
    throw Error(ErrorKind::CertificationFailure, "generators left their subspaces");
  }
  return ctx;
}

LevelElement two_level_element(const PairContext& ctx, double u, double v) {
  if (!(v >= 0.0) || !(u > v) || !std::isfinite(u)) {
    std::ostringstream msg;
    msg << "need u > v >= 0, got u = " << u << ", v = " << v;
    throw Error(ErrorKind::DegenerateTarget, msg.str());
  }
  const Vector base = v * ctx.s;
  auto phi = [&](double mu) { return distance(base + mu * ctx.t, ctx.q1, ctx.kind).rho; };
  LevelElement out;
  out.u = u;
  out.v = v;
  out.mu = solve_crossing_expanding(phi, 0.0, u, u, ctx.root_tol, ErrorKind::NoBracket, "mu search");
  out.q = base + out.mu * ctx.t;
  require_certified(out.q, ctx.q1, ctx.kind, u, ctx.certify_tol, "rho(q, Q1)");
  require_certified(out.q, ctx.q2, ctx.kind, v, ctx.certify_tol, "rho(q, Q2)");
  return out;
}

PairFamily pair_family(const Subspace& q1, const Subspace& q2, const Subspace& q3,
                       const std::vector<std::pair<double, double>>& pairs, NormKind kind,
                       const PairOptions& options) {
  for (const auto& [u, v] : pairs) {
    if (!(v >= 0.0) || !(u > v)) {
      std::ostringstream msg;
      msg << "need u > v >= 0, got (" << u << ", " << v << ")";
      throw Error(ErrorKind::DegenerateTarget, msg.str());
    }
  }
  PairFamily family{make_pair_context(q1, q2, q3, kind, options), {}};
  for (const auto& [u, v] : pairs) family.elements.push_back(two_level_element(family.context, u, v));

  double c = 1.0;
  const auto& el = family.elements;
  for (std::size_t m = 0; m < el.size(); ++m) {
    for (std::size_t n = m + 1; n < el.size(); ++n) {
      const double spread = std::max(el[m].u, el[n].u) - std::min(el[m].v, el[n].v);
      c = std::max(c, norm_of(el[m].q - el[n].q, kind) / spread);
    }
  }
  family.context.lipschitz_c = c;
  return family;
}

std::string_view to_string(Orientation o) { return o == Orientation::Minus ? "minus" : "plus"; }

Orientation parse_orientation(std::string_view tag) {
  if (tag == "minus") return Orientation::Minus;
  if (tag == "plus") return Orientation::Plus;
  throw Error(ErrorKind::InvalidArgument, "orientation must be 'minus' or 'plus'");
}

namespace {

// Split-variable helpers: a free vector v is written v+ - v- with v+, v- >= 0.

// min ||f||_* subject to A f = rhs.
Vector min_dual_norm_solution(const Matrix& A, const Vector& rhs, NormKind primal) {
  const Index R = A.rows();
  const Index D = A.cols();
  if (primal == NormKind::L2) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
    return cod.solve(rhs);
  }
  const bool linf_dual = primal == NormKind::L1;
  const Index n = 2 * D + (linf_dual ? 1 : 0);
  const Index bound_rows = linf_dual ? 2 * D : 0;
  Matrix M = Matrix::Zero(bound_rows + 2 * R, n);
  Vector b = Vector::Zero(bound_rows + 2 * R);
  Vector c = Vector::Zero(n);
  if (linf_dual) {
    for (Index i = 0; i < D; ++i) {
      M(i, i) = 1.0;
      M(i, D + i) = -1.0;
      M(i, 2 * D) = -1.0;
      M(D + i, i) = -1.0;
      M(D + i, D + i) = 1.0;
      M(D + i, 2 * D) = -1.0;
    }
    c(2 * D) = -1.0;
  } else {
    c.head(2 * D).setConstant(-1.0);
  }
  M.block(bound_rows, 0, R, D) = A;
  M.block(bound_rows, D, R, D) = -A;
  M.block(bound_rows + R, 0, R, D) = -A;
  M.block(bound_rows + R, D, R, D) = A;
  b.segment(bound_rows, R) = rhs;
  b.segment(bound_rows + R, R) = -rhs;
  const LpResult lp = solve_lp(M, b, c);
  if (lp.status != LpStatus::Optimal) {
    throw Error(ErrorKind::SolverFailure, "minimum-norm interpolation program failed");
  }
  return lp.x.head(D) - lp.x.segment(D, D);
}

// max rhs^T y subject to ||A^T y|| <= 1 (primal norm), rescaled so the
// constraint holds exactly; a lower bound on min ||f||_* with A f = rhs.
double min_dual_norm_lower_bound(const Matrix& A, const Vector& rhs, NormKind primal) {
  const Index R = A.rows();
  const Index D = A.cols();
  Vector y;
  if (primal == NormKind::L2) {
    y = (A * A.transpose()).ldlt().solve(rhs);
  } else {
    const bool l1 = primal == NormKind::L1;
    const Index n = 2 * R + (l1 ? D : 0);
    const Index rows = l1 ? 2 * D + 1 : 2 * D;
    Matrix M = Matrix::Zero(rows, n);
    Vector b = Vector::Zero(rows);
    const Matrix At = A.transpose();
    M.block(0, 0, D, R) = At;
    M.block(0, R, D, R) = -At;
    M.block(D, 0, D, R) = -At;
    M.block(D, R, D, R) = At;
    if (l1) {
      M.block(0, 2 * R, D, D) = -Matrix::Identity(D, D);
      M.block(D, 2 * R, D, D) = -Matrix::Identity(D, D);
      M.row(2 * D).tail(D).setOnes();
      b(2 * D) = 1.0;
    } else {
      b.setOnes();
    }
    Vector c = Vector::Zero(n);
    c.head(R) = rhs;
    c.segment(R, R) = -rhs;
    const LpResult lp = solve_lp(M, b, c);
    if (lp.status != LpStatus::Optimal) {
      throw Error(ErrorKind::SolverFailure, "interpolation dual program failed");
    }
    y = lp.x.head(R) - lp.x.segment(R, R);
  }
  const double n = norm_of(A.transpose() * y, primal);
  return n > 0.0 ? rhs.dot(y) / std::max(n, primal == NormKind::L2 ? n : 1.0) : 0.0;
}

// Extreme values of x2(f) over {f : A f = rhs, ||f||_* <= radius}.
std::pair<double, double> value_range(const Matrix& A, const Vector& rhs, const Vector& x2,
                                      double radius, NormKind primal) {
  const Index R = A.rows();
  const Index D = A.cols();
  const bool linf_dual = primal == NormKind::L1;
  const Index bound_rows = linf_dual ? 2 * D : 1;
  Matrix M = Matrix::Zero(bound_rows + 2 * R, 2 * D);
  Vector b = Vector::Zero(bound_rows + 2 * R);
  if (linf_dual) {
    M.topLeftCorner(2 * D, 2 * D).setIdentity();
    b.head(2 * D).setConstant(radius);
  } else {
    M.row(0).setOnes();
    b(0) = radius;
  }
  M.block(bound_rows, 0, R, D) = A;
  M.block(bound_rows, D, R, D) = -A;
  M.block(bound_rows + R, 0, R, D) = -A;
  M.block(bound_rows + R, D, R, D) = A;
  b.segment(bound_rows, R) = rhs;
  b.segment(bound_rows + R, R) = -rhs;
  Vector c(2 * D);
  c.head(D) = x2;
  c.tail(D) = -x2;
  const LpResult hi = solve_lp(M, b, c);
  const LpResult lo = solve_lp(M, b, -c);
  if (hi.status != LpStatus::Optimal || lo.status != LpStatus::Optimal) {
    throw Error(ErrorKind::SolverFailure, "forced-value range program failed");
  }
  return {-lo.objective, hi.objective};
}

}  // namespace

FunctionalProbe prescribed_functional_probe(const Vector& x1, const Vector& x2, const Subspace& q,
                                            double delta, Orientation orientation, NormKind kind) {
  auto violation = [](const std::string& msg) { return Error(ErrorKind::PreconditionViolation, msg); };
  if (x1.size() != q.ambient_dim() || x2.size() != q.ambient_dim()) {
    throw violation("x1, x2 and Q must share the ambient dimension");
  }
  if (!std::isfinite(delta) || delta < 0.0) throw violation("delta must be finite and >= 0");
  const double rho1 = distance(x1, q, kind).rho;
  const double rho2 = distance(x2, q, kind).rho;
  if (!(rho1 > 1e-12 * std::max(1.0, norm_of(x1, kind)))) throw violation("x1 lies in Q");
  if (!(rho2 > 1e-12 * std::max(1.0, norm_of(x2, kind)))) throw violation("x2 lies in Q");
  std::vector<Vector> span_basis;
  for (Index i = 0; i < q.rank(); ++i) span_basis.push_back(q.generator(i));
  span_basis.push_back(x1);
  if (Subspace(span_basis, q.ambient_dim()).residual(x2) <= 1e-10 * std::max(1.0, x2.norm())) {
    throw violation("x2 lies in span({x1} + Q)");
  }
  const double sigma = orientation == Orientation::Minus ? 1.0 : -1.0;
  const double base = distance(x2 - sigma * delta * x1, q, kind).rho;
  for (int i = 1; i <= 100; ++i) {
    const double a = delta + 0.1 * i;
    if (base > distance(x2 - sigma * a * x1, q, kind).rho + 1e-9 * std::max(1.0, base)) {
      std::ostringstream msg;
      msg << "delta = " << delta << " is not minimal: a = " << a << " does better";
      throw violation(msg.str());
    }
  }

  FunctionalProbe probe;
  probe.x1 = x1;
  probe.x2 = x2;
  probe.kind = kind;
  probe.delta = delta;
  probe.orientation = orientation;
  probe.nu = orientation == Orientation::Minus ? delta - base / rho1 : -delta + base / rho1;
  probe.required_norm = 1.0 / rho1;

  const Index r = q.rank();
  Matrix A(r + 2, q.ambient_dim());
  A.topRows(r) = q.orthonormal().transpose();
  A.row(r) = x1.transpose();
  A.row(r + 1) = x2.transpose();
  Vector rhs = Vector::Zero(r + 2);
  rhs(r) = 1.0;
  rhs(r + 1) = probe.nu;

  probe.functional = min_dual_norm_solution(A, rhs, kind);
  probe.achieved_norm = dual_norm_of(probe.functional, kind);
  probe.dual_bound = min_dual_norm_lower_bound(A, rhs, kind);
  probe.margin = probe.achieved_norm / probe.required_norm;
  probe.feasible = probe.margin <= 1.0 + 1e-9;

  const Matrix A_forced = A.topRows(r + 1);
  const Vector rhs_forced = rhs.head(r + 1);
  if (kind == NormKind::L2) {
    const Vector residual = x1 - q.project(x1);
    const double value = residual.dot(x2) / residual.squaredNorm();
    probe.forced_low = probe.forced_high = value;
  } else {
    const auto [lo, hi] =
        value_range(A_forced, rhs_forced, x2, probe.required_norm * (1.0 + 1e-10), kind);
    probe.forced_low = lo;
    probe.forced_high = hi;
  }
  const double slack = 1e-9 * std::max(1.0, std::abs(probe.nu));
  probe.nu_in_forced_range = probe.nu >= probe.forced_low - slack && probe.nu <= probe.forced_high + slack;
  return probe;
}

}  // namespace lethargy
