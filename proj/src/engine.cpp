#include "lethargy/engine.hpp"

#include "lethargy/error.hpp"
#include "lethargy/finite_chain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace lethargy {

namespace {

void require_strict_head(const DeviationSequence& seq, std::size_t upto) {
  for (std::size_t i = 1; i < upto; ++i) {
    if (!(seq.value(i) < seq.value(i - 1))) {
      std::ostringstream msg;
      msg << "head d_1..d_" << upto << " must be strictly decreasing; d_" << i << " = d_" << i + 1
          << " = " << seq.value(i);
      throw Error(ErrorKind::HeadTies, msg.str());
    }
  }
}

std::vector<double> head_values(const DeviationSequence& seq, std::size_t count) {
  return {seq.values().begin(), seq.values().begin() + static_cast<std::ptrdiff_t>(count)};
}

}  // namespace

ReductionPlan preprocess(const Chain& chain, const DeviationSequence& seq, double tail_tol) {
  require_valid_chain(chain);
  if (chain.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty chain");
  if (seq.size() != chain.size()) {
    throw Error(ErrorKind::InvalidArgument, "need one deviation value per subspace");
  }
  ReductionPlan plan;
  plan.size = chain.size();
  plan.last = chain.size();
  if (const auto zero = seq.first_zero()) {
    plan.zero_from = *zero + 1;
    plan.last = *zero;
  }
  if (plan.last == 0) return plan;

  plan.n0 = check_tail_condition(seq.slice(0, plan.last), tail_tol);
  plan.start = plan.n0;
  if (plan.start == 1 && chain[0].is_zero()) {
    plan.start = 2;
    plan.zero_first_subspace = true;
  }
  if (plan.start > 1) {
    plan.head_fix = true;
    require_strict_head(seq, std::min(plan.start, plan.last));
  }
  return plan;
}

std::vector<LevelData> level_elements(const Chain& chain, const DeviationSequence& seq, std::size_t first,
                                      std::size_t last, const Subspace& outer, NormKind kind,
                                      const EngineOptions& options) {
  if (first < 1 || last > chain.size() || first > last) {
    throw Error(ErrorKind::InvalidArgument, "level range out of bounds");
  }
  const double tau = seq.tail(last - 1);
  const Subspace origin = Subspace::zero(chain.ambient_dim);
  PairOptions pair_options;
  pair_options.root_tol = options.root_tol;
  pair_options.certify_tol = options.certify_tol;

  std::vector<LevelData> levels;
  for (std::size_t j = first; j <= last; ++j) {
    const double d = seq.value(j - 1);
    if (!(d > 0.0)) {
      std::ostringstream msg;
      msg << "d_" << j << " = " << d << " inside the level range";
      throw Error(ErrorKind::InvalidArgument, msg.str());
    }
    const Subspace& q3 = j < last ? chain[j] : outer;
    const PairContext ctx = make_pair_context(origin, chain[j - 1], q3, kind, pair_options);
    LevelData level;
    level.j = j;
    level.u = 1.0 + tau / std::ldexp(d, static_cast<int>(std::min<std::size_t>(j, 1000)));
    // With a zero tail u = 1 and the generator s already has norm 1 and
    // distance 1 to Q2.
    level.q = level.u > 1.0 ? two_level_element(ctx, level.u, 1.0).q : ctx.s;
    level.f = norming_functional(level.q, chain[j - 1], kind);
    if (std::abs(level.f(level.q) - 1.0) > options.certify_tol ||
        level.f.dual_norm_value > 1.0 + options.certify_tol) {
      std::ostringstream msg;
      msg << "level " << j << ": norming functional gives f(q) = " << level.f(level.q) << ", ||f|| = "
          << level.f.dual_norm_value;
      throw Error(ErrorKind::CertificationFailure, msg.str());
    }
    levels.push_back(std::move(level));
  }
  return levels;
}

SweepState backward_sweep(const Chain& chain, const std::vector<LevelData>& levels,
                          const DeviationSequence& seq, NormKind kind, const EngineOptions& options) {
  if (levels.empty()) throw Error(ErrorKind::InvalidArgument, "no levels to sweep");
  auto check_level = [&](const Vector& p, std::size_t j) {
    const double d = seq.value(j - 1);
    const double rho = distance(p, chain[j - 1], kind).rho;
    if (std::abs(rho - d) > options.certify_tol * std::max(1.0, d)) {
      std::ostringstream msg;
      msg << "rho(x, Y_" << j << ") = " << rho << " drifted from d_" << j << " = " << d;
      throw Error(ErrorKind::CertificationFailure, msg.str());
    }
  };

  SweepState state;
  state.lambdas.assign(levels.size(), 0.0);
  const LevelData& top = levels.back();
  state.lambdas.back() = seq.value(top.j - 1);
  state.partial = state.lambdas.back() * top.q;
  check_level(state.partial, top.j);

  for (std::size_t i = levels.size() - 1; i-- > 0;) {
    const LevelData& level = levels[i];
    const double d = seq.value(level.j - 1);
    const double slack = 1e-12 * state.partial.lpNorm<Eigen::Infinity>();
    const double sign = level.f(state.partial) >= -slack ? 1.0 : -1.0;
    auto phi = [&](double a) { return distance(state.partial + (sign * a) * level.q, chain[level.j - 1], kind).rho; };
    const double a = solve_crossing(phi, 0.0, d, d, options.root_tol, ErrorKind::BracketFailure,
                                    "sweep level " + std::to_string(level.j));
    state.lambdas[i] = sign * a;
    state.partial += state.lambdas[i] * level.q;
    for (std::size_t m = i + 1; m < levels.size(); ++m) check_level(state.partial, levels[m].j);
  }
  state.k = levels.front().j;
  return state;
}

ReportRow certify_row(const Vector& x, const Subspace& y, std::size_t n, double d, double target_lo,
                      double target_hi, NormKind kind) {
  ReportRow row;
  row.n = n;
  row.d = d;
  row.rho = distance(x, y, kind).rho;
  const DistanceCertificate cert = certify(x, y, kind);
  row.cert_lower = cert.lower;
  row.cert_upper = cert.upper;
  row.ratio = d > 0.0 ? row.rho / d : 0.0;
  row.target_lo = target_lo;
  row.target_hi = target_hi;
  row.pass = cert.lower >= target_lo && cert.upper <= target_hi;
  return row;
}

ExactResult construct_exact(const Chain& chain, const DeviationSequence& seq, NormKind kind,
                            const EngineOptions& options) {
  return construct_exact(chain, seq, Subspace::full(chain.ambient_dim), kind, options);
}

ExactResult construct_exact(const Chain& chain, const DeviationSequence& seq, const Subspace& outer,
                            NormKind kind, const EngineOptions& options) {
  ExactResult out;
  out.plan = preprocess(chain, seq, options.tail_tol);
  const ReductionPlan& plan = out.plan;
  if (!strictly_nested(chain[chain.size() - 1], outer)) {
    throw Error(ErrorKind::InvalidArgument, "outer space must strictly contain the chain");
  }
  const Subspace& ceiling = plan.zero_from ? chain[plan.last] : outer;
  FiniteOptions finite_options{options.root_tol, options.certify_tol};

  if (plan.last == 0) {
    out.x = Vector::Zero(chain.ambient_dim);
  } else if (plan.start > plan.last) {
    const Chain head = chain.slice(0, plan.last);
    const auto d = head_values(seq, plan.last);
    out.x = construct_finite(head, d, default_anchor(head, ceiling), kind, finite_options).x;
  } else {
    out.levels = level_elements(chain, seq, plan.start, plan.last, ceiling, kind, options);
    const SweepState sweep = backward_sweep(chain, out.levels, seq, kind, options);
    out.lambdas = sweep.lambdas;
    out.tail_point = sweep.partial;
    if (plan.head_fix) {
      // x - z lies in Y_start, so the distances from start on are untouched.
      const auto d = head_values(seq, plan.start);
      out.x = construct_finite(chain.slice(0, plan.start), d, out.tail_point, kind, finite_options).x;
    } else {
      out.x = out.tail_point;
    }
  }

  out.pass = true;
  for (std::size_t n = 1; n <= chain.size(); ++n) {
    const double d = seq.value(n - 1);
    const double band = options.accept_tol * d + 1e-12;
    out.rows.push_back(certify_row(out.x, chain[n - 1], n, d, d - band, d + band, kind));
    out.pass = out.pass && out.rows.back().pass;
  }
  return out;
}

ConvergenceTable convergence_probe(const Chain& chain, const DeviationSequence& seq,
                                   std::span<const std::size_t> ns, NormKind kind,
                                   const EngineOptions& options) {
  ConvergenceTable table;
  table.ns.assign(ns.begin(), ns.end());
  std::vector<ExactResult> runs;
  for (const std::size_t n : ns) {
    if (n < 1 || n > chain.size() || n > seq.size()) {
      throw Error(ErrorKind::InvalidArgument, "truncation index out of range: " + std::to_string(n));
    }
    runs.push_back(construct_exact(chain.slice(0, n), seq.slice(0, n), chain.above(n - 1), kind, options));
  }

  for (std::size_t a = 0; a < runs.size(); ++a) {
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      for (const LevelData& la : runs[a].levels) {
        for (const LevelData& lb : runs[b].levels) {
          if (la.j != lb.j) continue;
          const double spread = std::max(la.u, lb.u) - 1.0;
          if (spread > 0.0) table.c = std::max(table.c, norm_of(la.q - lb.q, kind) / spread);
        }
      }
    }
  }

  for (const ExactResult& run : runs) table.points.push_back(run.x);
  std::map<std::size_t, double> worst;
  for (std::size_t a = 0; a < runs.size(); ++a) {
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      ConvergenceEntry e;
      e.m = std::min(ns[a], ns[b]);
      e.n = std::max(ns[a], ns[b]);
      e.distance = norm_of(runs[a].x - runs[b].x, kind);
      e.tail_component = table.c * seq.tail(e.m - 1) * (1.0 - std::ldexp(1.0, -static_cast<int>(e.m)));
      e.head_component = e.m >= 2 ? seq.value(e.m - 2) : 0.0;
      table.entries.push_back(e);
      auto [it, inserted] = worst.emplace(e.m, e.distance);
      if (!inserted) it->second = std::max(it->second, e.distance);
    }
  }
  double previous = INFINITY;
  for (const auto& [m, value] : worst) {
    if (value > previous + 1e-12) table.non_increasing = false;
    previous = value;
  }
  return table;
}

}  // namespace lethargy
