#include "lethargy/bounds.hpp"

#include "lethargy/error.hpp"
#include "lethargy/finite_chain.hpp"

#include <cmath>
#include <sstream>

namespace lethargy {

namespace {

constexpr double kReuseTolerance = 1e-12;

bool same_value(double a, double b) { return std::abs(a - b) <= kReuseTolerance * std::max(a, b); }

}  // namespace

ExtensionPlan plan_extension(const Chain& chain, const DeviationSequence& seq, double b) {
  if (!(b >= 2.0) || !std::isfinite(b)) {
    std::ostringstream msg;
    msg << "base b = " << b << " gives tails g_i / (b - 1) above g_i; need b >= 2";
    throw Error(ErrorKind::BaseTooSmall, msg.str());
  }
  require_valid_chain(chain);
  if (seq.size() != chain.size() || seq.empty()) {
    throw Error(ErrorKind::InvalidArgument, "need one deviation value per subspace");
  }
  const std::size_t N = seq.size();
  if (!(seq.value(N - 1) > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "deviation values must be strictly positive");
  }

  ExtensionPlan plan;
  plan.b = b;
  plan.K = b * seq.value(0);
  const Index D = chain.ambient_dim;
  const Subspace whole = Subspace::full(D);

  plan.merged_chain.ambient_dim = D;
  std::size_t next = 0;  // first original not yet passed
  Subspace prev = Subspace::zero(D);
  double g = seq.value(0);
  for (std::size_t i = 1;; ++i, g /= b) {
    while (next < N && seq.value(next) > g && !same_value(seq.value(next), g)) {
      prev = chain[next];
      ++next;
    }
    ExtensionEntry entry;
    entry.i = i;
    entry.g = g;
    if (next < N && same_value(seq.value(next), g)) {
      entry.reused_from = next + 1;
      entry.rank = chain[next].rank();
      prev = chain[next];
      ++next;
    } else {
      const Index high = next < N ? chain[next].rank() : D;
      if (prev.rank() + 1 >= high) {
        std::ostringstream msg;
        msg << "no free rank for g_" << i << " = " << g << " between rank " << prev.rank() << " and rank "
            << high;
        throw Error(ErrorKind::InsufficientGaps, msg.str());
      }
      entry.rank = prev.rank() + 1;
      prev = extend_within(prev, next < N ? chain[next] : whole, entry.rank);
    }
    plan.merged_chain.subspaces.push_back(prev);
    plan.entries.push_back(entry);
    if (g < seq.value(N - 1)) break;
  }
  plan.merged_seq = DeviationSequence::geometric(plan.K, 1.0 / b, plan.entries.size());
  require_valid_chain(plan.merged_chain);
  return plan;
}

BoundedResult construct_bounded(const Chain& chain, const DeviationSequence& seq, double c, double b,
                                NormKind kind, const BoundedOptions& options) {
  if (!(c > 0.0) || c > 1.0) throw Error(ErrorKind::InvalidArgument, "c must lie in (0, 1]");
  BoundedResult out;
  out.c = c;
  out.b = b;
  out.plan = plan_extension(chain, seq, b);
  const ExactResult exact = construct_exact(out.plan.merged_chain, out.plan.merged_seq, kind, options.engine);
  out.merged_rows = exact.rows;
  out.x = exact.x;
  out.x_c = (b * c) * out.x;

  out.pass = exact.pass;
  for (std::size_t n = 1; n <= chain.size(); ++n) {
    const double d = seq.value(n - 1);
    out.pre_ratios.push_back(distance(out.x, chain[n - 1], kind).rho / d);
    out.rows.push_back(
        certify_row(out.x_c, chain[n - 1], n, d, c * d - options.slack, b * b * c * d + options.slack, kind));
    out.pass = out.pass && out.rows.back().pass;
  }
  return out;
}

HeadPerturbResult head_perturb(const Chain& chain, const DeviationSequence& seq, double eps, NormKind kind,
                               const BoundedOptions& options) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  }
  require_valid_chain(chain);
  if (seq.size() != chain.size()) {
    throw Error(ErrorKind::InvalidArgument, "need one deviation value per subspace");
  }
  const auto zero = seq.first_zero();
  if (!zero) throw Error(ErrorKind::InvalidArgument, "head perturbation needs a zero tail");

  HeadPerturbResult out;
  out.n0 = *zero;
  const double n0 = static_cast<double>(out.n0);
  for (std::size_t n = 1; n <= out.n0; ++n) {
    out.perturbed.push_back((1.0 + (n0 - static_cast<double>(n)) * eps / n0) * seq.value(n - 1));
  }
  if (out.n0 == 0) {
    out.x = Vector::Zero(chain.ambient_dim);
  } else {
    const Chain head = chain.slice(0, out.n0);
    FiniteOptions finite{options.engine.root_tol, options.engine.certify_tol};
    out.x = construct_finite(head, out.perturbed, default_anchor(head, chain[out.n0]), kind, finite).x;
  }

  out.pass = true;
  for (std::size_t n = 1; n <= chain.size(); ++n) {
    const double d = seq.value(n - 1);
    out.rows.push_back(
        certify_row(out.x, chain[n - 1], n, d, d - options.slack, (1.0 + eps) * d + options.slack, kind));
    out.pass = out.pass && out.rows.back().pass;
  }
  return out;
}

}  // namespace lethargy
