#include "lethargy/finite_chain.hpp"

#include "lethargy/error.hpp"

#include <cmath>
#include <sstream>

namespace lethargy {

Vector default_anchor(const Chain& chain, const Subspace& outer) {
  if (chain.size() == 0) return first_generator_outside(outer, Subspace::zero(outer.ambient_dim()));
  return first_generator_outside(outer, chain.subspaces.back());
}

AnchoredElement construct_finite(const Chain& chain, std::span<const double> d, const Vector& anchor,
                                 NormKind kind, const FiniteOptions& options) {
  if (chain.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty chain");
  if (d.size() != chain.size()) {
    throw Error(ErrorKind::InvalidArgument, "need one target per subspace");
  }
  require_valid_chain(chain);
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (!std::isfinite(d[k]) || d[k] < 0.0 || (k > 0 && !(d[k] < d[k - 1]))) {
      std::ostringstream msg;
      msg << "targets must satisfy d_1 > ... > d_n >= 0 (position " << k + 1 << ")";
      throw Error(ErrorKind::NotStrictlyDecreasing, msg.str());
    }
  }
  const std::size_t n = chain.size();
  const Subspace& top = chain[n - 1];
  if (anchor.size() != chain.ambient_dim) {
    throw Error(ErrorKind::DimMismatch, "anchor dimension does not match the chain");
  }
  const double anchor_rho = distance(anchor, top, kind).rho;
  if (!(anchor_rho > 1e-12 * std::max(1.0, norm_of(anchor, kind)))) {
    throw Error(ErrorKind::AnchorInsideTop, "anchor lies in the top subspace");
  }

  AnchoredElement out;
  out.anchor = anchor;
  out.lambda = d[n - 1] / anchor_rho;
  Vector x = out.lambda * anchor;

  for (std::size_t k = n - 1; k-- > 0;) {
    const Subspace& lower = chain[k];
    const Subspace& upper = chain[k + 1];
    x -= nearest_point(x, upper, kind);

    Vector y = first_generator_outside(upper, lower);
    y /= distance(y, lower, kind).rho;
    const Functional g = norming_functional(y, lower, kind);
    const double sign = g(x) >= 0.0 ? 1.0 : -1.0;

    // rho(x + a*sign*y, Y_k) >= |g(x) + a*sign| >= a, so [0, d_k] brackets.
    auto phi = [&](double a) { return distance(x + (sign * a) * y, lower, kind).rho; };
    const double a = solve_crossing(phi, 0.0, d[k], d[k], options.root_tol,
                                    ErrorKind::CertificationFailure,
                                    "finite chain level " + std::to_string(k + 1));
    x += (sign * a) * y;

    for (std::size_t m = k + 1; m < n; ++m) {
      const double rho = distance(x, chain[m], kind).rho;
      if (std::abs(rho - d[m]) > options.certify_tol * std::max(1.0, d[m])) {
        std::ostringstream msg;
        msg << "distance to Y_" << m + 1 << " drifted to " << rho << " (target " << d[m] << ")";
        throw Error(ErrorKind::CertificationFailure, msg.str());
      }
    }
  }
  x -= nearest_point(x, chain[0], kind);

  for (std::size_t k = 0; k < n; ++k) {
    const auto cert = certify_distance(x, chain[k], kind, d[k], options.certify_tol * std::max(1.0, d[k]));
    if (!cert.pass) {
      std::ostringstream msg;
      msg << "rho(x, Y_" << k + 1 << ") in [" << cert.certificate.lower << ", "
          << cert.certificate.upper << "], target " << d[k];
      throw Error(ErrorKind::CertificationFailure, msg.str());
    }
  }
  out.anchor_residual = top.residual(x - out.lambda * anchor);
  out.x = std::move(x);
  return out;
}

}  // namespace lethargy
