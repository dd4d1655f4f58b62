#include "lethargy/harness.hpp"

#include "lethargy/bounds.hpp"
#include "lethargy/finite_chain.hpp"
#include "lethargy/simplex.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#ifndef LETHARGY_VERSION
#define LETHARGY_VERSION "0.0.0"
#endif

namespace lethargy {

namespace fs = std::filesystem;

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Exact: return "exact";
    case Mode::Konyagin: return "konyagin";
    case Mode::Probe: return "probe";
    case Mode::Finite: return "finite";
    case Mode::Converge: return "converge";
  }
  return "exact";
}

Mode parse_mode(std::string_view tag) {
  if (tag == "exact") return Mode::Exact;
  if (tag == "konyagin") return Mode::Konyagin;
  if (tag == "probe") return Mode::Probe;
  if (tag == "finite") return Mode::Finite;
  if (tag == "converge") return Mode::Converge;
  throw Error(ErrorKind::SchemaError, "mode: unknown mode '" + std::string(tag) + "'");
}

namespace {

// ---------------------------------------------------------------------------
// Schema helpers. Every diagnostic starts with the field path.

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::SchemaError, path + ": " + what);
}

[[noreturn]] void cross_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::CrossFieldError, path + ": " + what);
}

const Json& field(const Json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, "missing required field");
  return *it;
}

const Json* optional_field(const Json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  return j.get<double>();
}

std::int64_t as_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

const Json& as_array(const Json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  return j;
}

const Json& as_object(const Json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  return j;
}

Vector as_vector(const Json& j, const std::string& path) {
  as_array(j, path);
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) = as_number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

std::vector<Vector> as_vector_list(const Json& j, const std::string& path) {
  as_array(j, path);
  std::vector<Vector> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_vector(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

NormKind as_norm(const Json& j, const std::string& path) {
  const std::string tag = as_string(j, path);
  try {
    return parse_norm(tag);
  } catch (const Error&) {
    schema_error(path, "unknown norm '" + tag + "' (L1, L2 or LINF)");
  }
}

double positive(const Json& obj, const std::string& key, const std::string& path) {
  const double v = as_number(field(obj, key, path), path);
  if (!(v > 0.0) || !std::isfinite(v)) schema_error(path, "must be positive");
  return v;
}

Chain parse_chain(const Json& j, Index D) {
  as_object(j, "chain");
  const Json* dims = optional_field(j, "dims");
  const Json* bases = optional_field(j, "bases");
  if ((dims == nullptr) == (bases == nullptr)) schema_error("chain", "give exactly one of 'dims' or 'bases'");
  Chain chain;
  if (dims) {
    as_array(*dims, "chain.dims");
    std::vector<Index> ranks;
    for (std::size_t i = 0; i < dims->size(); ++i) {
      const auto r = as_integer((*dims)[i], "chain.dims[" + std::to_string(i) + "]");
      if (r < 0) schema_error("chain.dims[" + std::to_string(i) + "]", "must be non-negative");
      ranks.push_back(static_cast<Index>(r));
    }
    try {
      chain = coordinate_chain(ranks, D);
    } catch (const Error& e) {
      cross_error("chain.dims", e.what());
    }
  } else {
    as_array(*bases, "chain.bases");
    chain.ambient_dim = D;
    for (std::size_t i = 0; i < bases->size(); ++i) {
      const std::string path = "chain.bases[" + std::to_string(i) + "]";
      const auto vectors = as_vector_list((*bases)[i], path);
      for (const Vector& v : vectors) {
        if (v.size() != D) cross_error(path, "vector length differs from ambient_dim");
      }
      try {
        chain.subspaces.emplace_back(vectors, D);
      } catch (const Error& e) {
        cross_error(path, e.what());
      }
    }
  }
  if (chain.size() == 0) schema_error("chain", "must contain at least one subspace");
  const ChainDiagnostics diag = validate_chain(chain);
  if (!diag.ok) cross_error("chain", diag.message);
  return chain;
}

DeviationSequence parse_sequence(const Json& j, std::size_t default_length) {
  as_object(j, "sequence");
  const std::string kind = as_string(field(j, "kind", "sequence.kind"), "sequence.kind");
  auto length = [&]() -> std::size_t {
    const Json* l = optional_field(j, "length");
    if (!l) return default_length;
    const auto v = as_integer(*l, "sequence.length");
    if (v < 1) schema_error("sequence.length", "must be at least 1");
    return static_cast<std::size_t>(v);
  };
  try {
    if (kind == "geometric") {
      const double K = positive(j, "K", "sequence.K");
      const double ratio = positive(j, "ratio", "sequence.ratio");
      if (!(ratio < 1.0)) schema_error("sequence.ratio", "must lie in (0, 1)");
      return DeviationSequence::geometric(K, ratio, length());
    }
    if (kind == "explicit") {
      const Vector v = as_vector(field(j, "values", "sequence.values"), "sequence.values");
      std::vector<double> values(v.data(), v.data() + v.size());
      if (const Json* r = optional_field(j, "tail_ratio")) {
        if (optional_field(j, "tail_value")) schema_error("sequence", "give tail_value or tail_ratio, not both");
        return DeviationSequence::with_geometric_tail(std::move(values), as_number(*r, "sequence.tail_ratio"));
      }
      const Json* t = optional_field(j, "tail_value");
      return DeviationSequence::explicit_values(std::move(values), t ? as_number(*t, "sequence.tail_value") : 0.0);
    }
    if (kind == "power") {
      return DeviationSequence::power(positive(j, "p", "sequence.p"), length());
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SchemaError) throw;
    schema_error("sequence", e.what());
  }
  schema_error("sequence.kind", "unknown kind '" + kind + "' (geometric, explicit or power)");
}

ProbeInput parse_probe(const Json& j, std::size_t i, NormKind default_norm) {
  const std::string path = "probes[" + std::to_string(i) + "]";
  as_object(j, path);
  ProbeInput p;
  p.name = optional_field(j, "name") ? as_string(j["name"], path + ".name") : "probe" + std::to_string(i + 1);
  p.norm = optional_field(j, "norm") ? as_norm(j["norm"], path + ".norm") : default_norm;
  p.x1 = as_vector(field(j, "x1", path + ".x1"), path + ".x1");
  p.x2 = as_vector(field(j, "x2", path + ".x2"), path + ".x2");
  if (p.x1.size() == 0 || p.x1.size() != p.x2.size()) cross_error(path, "x1 and x2 need the same positive length");
  if (const Json* q = optional_field(j, "q")) p.q = as_vector_list(*q, path + ".q");
  for (const Vector& v : p.q) {
    if (v.size() != p.x1.size()) cross_error(path + ".q", "vector length differs from x1");
  }
  p.delta = as_number(field(j, "delta", path + ".delta"), path + ".delta");
  if (const Json* o = optional_field(j, "orientation")) {
    try {
      p.orientation = parse_orientation(as_string(*o, path + ".orientation"));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SchemaError) throw;
      schema_error(path + ".orientation", "must be 'minus' or 'plus'");
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Report pieces.

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json chain_json(const Chain& chain) {
  Json out = Json::array();
  for (const Subspace& s : chain.subspaces) {
    Json basis = Json::array();
    for (Index c = 0; c < s.rank(); ++c) basis.push_back(vector_json(s.basis().col(c)));
    out.push_back(basis);
  }
  return out;
}

Json row_json(const ReportRow& r) {
  return Json{{"n", r.n},
              {"d_n", r.d},
              {"rho", r.rho},
              {"cert_lower", r.cert_lower},
              {"cert_upper", r.cert_upper},
              {"ratio", r.ratio},
              {"target_lo", r.target_lo},
              {"target_hi", r.target_hi},
              {"pass", r.pass}};
}

Json probe_json(const ProbeInput& input, const FunctionalProbe& p) {
  Json q = Json::array();
  for (const Vector& v : input.q) q.push_back(vector_json(v));
  return Json{{"name", input.name},
              {"norm", std::string(to_string(input.norm))},
              {"x1", vector_json(input.x1)},
              {"x2", vector_json(input.x2)},
              {"q", q},
              {"delta", input.delta},
              {"orientation", std::string(to_string(input.orientation))},
              {"nu", p.nu},
              {"required_norm", p.required_norm},
              {"achieved_norm", p.achieved_norm},
              {"dual_bound", p.dual_bound},
              {"margin", p.margin},
              {"feasible", p.feasible},
              {"forced_low", p.forced_low},
              {"forced_high", p.forced_high},
              {"nu_in_forced_range", p.nu_in_forced_range},
              {"functional", vector_json(p.functional)}};
}

FunctionalProbe run_probe(const ProbeInput& input) {
  const Subspace q = input.q.empty() ? Subspace::zero(input.x1.size()) : Subspace(input.q, input.x1.size());
  return prescribed_functional_probe(input.x1, input.x2, q, input.delta, input.orientation, input.norm);
}

/// Acceptance band of row n for the configured mode.
std::pair<double, double> band_for(const RunConfig& cfg, double d) {
  const double acc = cfg.tolerances.accept;
  switch (cfg.mode) {
    case Mode::Konyagin: {
      const double c = cfg.c.value_or(1.0);
      return {c * d - acc, cfg.base * cfg.base * c * d + acc};
    }
    case Mode::Finite:
      if (cfg.eps) return {d - acc, (1.0 + *cfg.eps) * d + acc};
      [[fallthrough]];
    default: {
      const double half = acc * d + 1e-12;
      return {d - half, d + half};
    }
  }
}

EngineOptions engine_options(const RunConfig& cfg) {
  EngineOptions o;
  o.root_tol = cfg.tolerances.root;
  o.accept_tol = cfg.tolerances.accept;
  return o;
}

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

bool close(double a, double b, double tol) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

[[noreturn]] void tamper(const std::string& what) { throw Error(ErrorKind::TamperDetected, what); }

// Reports store non-finite numbers as null.
double stored_number(const Json& j, const std::string& path) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return as_number(j, path);
}

}  // namespace

// ---------------------------------------------------------------------------

RunConfig parse_config(const Json& doc) {
  if (!doc.is_object()) schema_error("(root)", "configuration must be an object");
  RunConfig cfg;
  cfg.source = doc;
  if (const Json* n = optional_field(doc, "name")) cfg.name = as_string(*n, "name");
  cfg.norm = as_norm(field(doc, "norm", "norm"), "norm");
  cfg.mode = parse_mode(as_string(field(doc, "mode", "mode"), "mode"));

  if (const Json* t = optional_field(doc, "tolerances")) {
    as_object(*t, "tolerances");
    if (optional_field(*t, "solver")) cfg.tolerances.solver = positive(*t, "solver", "tolerances.solver");
    if (optional_field(*t, "root")) cfg.tolerances.root = positive(*t, "root", "tolerances.root");
    if (optional_field(*t, "accept")) cfg.tolerances.accept = positive(*t, "accept", "tolerances.accept");
  }
  if (const Json* s = optional_field(doc, "seed")) {
    const auto seed = as_integer(*s, "seed");
    if (seed < 0) schema_error("seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  if (const Json* c = optional_field(doc, "c")) {
    cfg.c = as_number(*c, "c");
    if (!(*cfg.c > 0.0) || *cfg.c > 1.0) schema_error("c", "must lie in (0, 1]");
  }
  if (const Json* b = optional_field(doc, "base")) cfg.base = as_number(*b, "base");
  if (const Json* e = optional_field(doc, "eps")) cfg.eps = as_number(*e, "eps");

  if (cfg.mode == Mode::Probe) {
    const Json* probes = optional_field(doc, "probes");
    if (!probes) cross_error("probes", "probe mode needs a non-empty probes list");
    as_array(*probes, "probes");
    if (probes->empty()) cross_error("probes", "probe mode needs a non-empty probes list");
    for (std::size_t i = 0; i < probes->size(); ++i) cfg.probes.push_back(parse_probe((*probes)[i], i, cfg.norm));
    return cfg;
  }

  const auto D = as_integer(field(doc, "ambient_dim", "ambient_dim"), "ambient_dim");
  if (D < 1) schema_error("ambient_dim", "must be at least 1");
  cfg.ambient_dim = static_cast<Index>(D);
  cfg.chain = parse_chain(field(doc, "chain", "chain"), cfg.ambient_dim);
  cfg.sequence = parse_sequence(field(doc, "sequence", "sequence"), cfg.chain.size());
  if (cfg.sequence->size() != cfg.chain.size()) {
    cross_error("sequence", "has " + std::to_string(cfg.sequence->size()) + " values for " +
                                std::to_string(cfg.chain.size()) + " subspaces");
  }
  if (const Json* a = optional_field(doc, "anchor")) {
    cfg.anchor = as_vector(*a, "anchor");
    if (cfg.anchor->size() != cfg.ambient_dim) cross_error("anchor", "length differs from ambient_dim");
  }
  if (const Json* ns = optional_field(doc, "ns")) {
    as_array(*ns, "ns");
    for (std::size_t i = 0; i < ns->size(); ++i) {
      const auto n = as_integer((*ns)[i], "ns[" + std::to_string(i) + "]");
      if (n < 1 || static_cast<std::size_t>(n) > cfg.chain.size()) {
        cross_error("ns[" + std::to_string(i) + "]", "must lie between 1 and the chain length");
      }
      cfg.ns.push_back(static_cast<std::size_t>(n));
    }
  }

  switch (cfg.mode) {
    case Mode::Konyagin:
      if (!cfg.c) cross_error("c", "konyagin mode needs c");
      if (cfg.eps) cross_error("eps", "not used by konyagin mode");
      break;
    case Mode::Converge:
      if (!optional_field(doc, "ns")) cross_error("ns", "converge mode needs ns");
      break;
    case Mode::Finite:
      if (cfg.eps && cfg.anchor) cross_error("anchor", "the perturbed head picks its own anchor");
      break;
    default:
      break;
  }
  if (cfg.c && cfg.mode != Mode::Konyagin) cross_error("c", "only used by konyagin mode");
  if (cfg.eps && cfg.mode != Mode::Finite) cross_error("eps", "only used by finite mode");
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  if (doc.is_object() && !doc.contains("name")) doc["name"] = path.stem().string();
  return parse_config(doc);
}

std::string config_hash(const Json& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << "fnv1a64:" << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

Report run_scenario(const RunConfig& cfg) {
  const ScopedLpTolerance lp_tolerance(cfg.tolerances.solver);
  const auto started = std::chrono::steady_clock::now();
  const EngineOptions eo = engine_options(cfg);

  Report report;
  Json& doc = report.doc;
  Json config = cfg.source;
  config["tolerances"] = Json{{"solver", cfg.tolerances.solver},
                              {"root", cfg.tolerances.root},
                              {"accept", cfg.tolerances.accept}};
  doc["format"] = "lethargy-report";
  doc["format_version"] = 1;
  doc["config"] = config;
  doc["mode"] = std::string(to_string(cfg.mode));
  doc["norm"] = std::string(to_string(cfg.norm));
  Json findings = Json::object();
  Vector point;

  auto finish_rows = [&](std::vector<ReportRow> rows) {
    report.rows = std::move(rows);
    report.pass = std::all_of(report.rows.begin(), report.rows.end(), [](const ReportRow& r) { return r.pass; });
  };

  switch (cfg.mode) {
    case Mode::Exact: {
      const ExactResult r = construct_exact(cfg.chain, *cfg.sequence, cfg.norm, eo);
      point = r.x;
      finish_rows(r.rows);
      Json plan{{"n0", r.plan.n0},
                {"start", r.plan.start},
                {"last", r.plan.last},
                {"head_fix", r.plan.head_fix},
                {"zero_first_subspace", r.plan.zero_first_subspace}};
      plan["zero_from"] = r.plan.zero_from ? Json(*r.plan.zero_from) : Json(nullptr);
      findings["plan"] = plan;
      findings["lambdas"] = r.lambdas;
      Json u = Json::array();
      for (const LevelData& l : r.levels) u.push_back(l.u);
      findings["level_norms"] = u;
      break;
    }
    case Mode::Konyagin: {
      BoundedOptions bo;
      bo.engine = eo;
      bo.slack = cfg.tolerances.accept;
      const BoundedResult r = construct_bounded(cfg.chain, *cfg.sequence, *cfg.c, cfg.base, cfg.norm, bo);
      point = r.x_c;
      finish_rows(r.rows);
      report.pass = report.pass && std::all_of(r.merged_rows.begin(), r.merged_rows.end(),
                                               [](const ReportRow& row) { return row.pass; });
      Json merged = Json::array();
      for (const ExtensionEntry& e : r.plan.entries) {
        merged.push_back(Json{{"i", e.i}, {"g", e.g}, {"rank", e.rank}, {"reused_from", e.reused_from}});
      }
      findings["extension"] = Json{{"K", r.plan.K}, {"base", r.plan.b}, {"c", r.c}, {"scale", r.b * r.c},
                                   {"merged", merged}};
      findings["pre_scaling_ratios"] = r.pre_ratios;
      break;
    }
    case Mode::Finite: {
      if (cfg.eps) {
        BoundedOptions bo;
        bo.engine = eo;
        bo.slack = cfg.tolerances.accept;
        const HeadPerturbResult r = head_perturb(cfg.chain, *cfg.sequence, *cfg.eps, cfg.norm, bo);
        point = r.x;
        finish_rows(r.rows);
        findings["perturbed_head"] = r.perturbed;
        findings["n0"] = r.n0;
      } else {
        const auto& d = cfg.sequence->values();
        const Vector anchor = cfg.anchor ? *cfg.anchor : default_anchor(cfg.chain, Subspace::full(cfg.ambient_dim));
        const AnchoredElement r =
            construct_finite(cfg.chain, d, anchor, cfg.norm, FiniteOptions{eo.root_tol, eo.certify_tol});
        point = r.x;
        std::vector<ReportRow> rows;
        for (std::size_t n = 1; n <= cfg.chain.size(); ++n) {
          const auto [lo, hi] = band_for(cfg, d[n - 1]);
          rows.push_back(certify_row(r.x, cfg.chain[n - 1], n, d[n - 1], lo, hi, cfg.norm));
        }
        finish_rows(std::move(rows));
        findings["lambda"] = r.lambda;
        findings["anchor"] = vector_json(r.anchor);
        findings["anchor_residual"] = r.anchor_residual;
      }
      break;
    }
    case Mode::Probe: {
      Json probes = Json::array();
      for (const ProbeInput& input : cfg.probes) probes.push_back(probe_json(input, run_probe(input)));
      findings["probes"] = probes;
      report.pass = true;
      break;
    }
    case Mode::Converge: {
      const ConvergenceTable t = convergence_probe(cfg.chain, *cfg.sequence, cfg.ns, cfg.norm, eo);
      Json entries = Json::array();
      for (const ConvergenceEntry& e : t.entries) {
        entries.push_back(Json{{"m", e.m},
                               {"n", e.n},
                               {"distance", e.distance},
                               {"tail_component", e.tail_component},
                               {"head_component", e.head_component}});
      }
      Json points = Json::array();
      for (const Vector& p : t.points) points.push_back(vector_json(p));
      findings["convergence"] = Json{{"ns", t.ns}, {"c", t.c}, {"non_increasing", t.non_increasing},
                                     {"entries", entries}, {"points", points}};
      if (!t.points.empty()) point = t.points.back();
      report.pass = true;
      break;
    }
  }

  if (cfg.mode != Mode::Probe) {
    doc["ambient_dim"] = cfg.ambient_dim;
    doc["chain"] = chain_json(cfg.chain);
  }
  doc["point"] = vector_json(point);
  Json rows = Json::array();
  for (const ReportRow& r : report.rows) rows.push_back(row_json(r));
  doc["rows"] = rows;
  doc["findings"] = findings;
  doc["verdict"] = report.pass ? "pass" : "fail";
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  doc["metadata"] = Json{{"tool", "lethargy"},
                         {"version", LETHARGY_VERSION},
                         {"eigen", eigen_version()},
                         {"config_hash", config_hash(config)},
                         {"seed", cfg.seed},
                         {"timings", Json{{"run_seconds", seconds}}}};
  return report;
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string rows_csv(const std::vector<ReportRow>& rows) {
  std::string out = "n,d_n,rho,cert_lower,cert_upper,ratio,pass\n";
  for (const ReportRow& r : rows) {
    out += std::to_string(r.n);
    for (const double v : {r.d, r.rho, r.cert_lower, r.cert_upper, r.ratio}) {
      out += ',';
      out += format_number(v);
    }
    out += r.pass ? ",true\n" : ",false\n";
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

void write_report(const Report& report, const fs::path& path) { write_text(path, report.doc.dump(2) + "\n"); }

void write_csv(const Report& report, const fs::path& path) { write_text(path, rows_csv(report.rows)); }

VerifyOutcome verify_report(const Json& report) {
  if (!report.is_object()) schema_error("(root)", "report must be an object");
  const RunConfig cfg = parse_config(as_object(field(report, "config", "config"), "config"));
  const ScopedLpTolerance lp_tolerance(cfg.tolerances.solver);
  if (as_string(field(report, "mode", "mode"), "mode") != to_string(cfg.mode) ||
      as_string(field(report, "norm", "norm"), "norm") != to_string(cfg.norm)) {
    tamper("mode or norm differs from the embedded configuration");
  }
  const std::string verdict = as_string(field(report, "verdict", "verdict"), "verdict");
  VerifyOutcome out;
  out.pass = true;
  constexpr double kReplayTolerance = 1e-9;

  if (cfg.mode == Mode::Probe) {
    const Json& probes = as_array(field(field(report, "findings", "findings"), "probes", "findings.probes"),
                                  "findings.probes");
    if (probes.size() != cfg.probes.size()) tamper("probe count differs from the configuration");
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const std::string path = "findings.probes[" + std::to_string(i) + "]";
      const FunctionalProbe fresh = run_probe(cfg.probes[i]);
      for (const auto& [key, value] : {std::pair<const char*, double>{"nu", fresh.nu},
                                       {"required_norm", fresh.required_norm},
                                       {"achieved_norm", fresh.achieved_norm},
                                       {"margin", fresh.margin}}) {
        const double stored = as_number(field(probes[i], key, path + "." + key), path + "." + key);
        if (!close(stored, value, kReplayTolerance)) tamper(path + "." + key + " does not match the replay");
      }
      if (field(probes[i], "feasible", path + ".feasible") != Json(fresh.feasible)) {
        tamper(path + ".feasible does not match the replay");
      }
      ++out.findings_checked;
    }
    if (verdict != "pass") tamper("probe reports always carry a passing verdict");
    return out;
  }

  const Json& point_json = field(report, "point", "point");
  const Vector x = as_vector(point_json, "point");
  const Json& chain_doc = as_array(field(report, "chain", "chain"), "chain");
  if (chain_doc.size() != cfg.chain.size()) tamper("chain length differs from the configuration");
  Chain chain;
  chain.ambient_dim = cfg.ambient_dim;
  for (std::size_t i = 0; i < chain_doc.size(); ++i) {
    const std::string path = "chain[" + std::to_string(i) + "]";
    const auto vectors = as_vector_list(chain_doc[i], path);
    const Subspace s = vectors.empty() ? Subspace::zero(cfg.ambient_dim) : Subspace(vectors, cfg.ambient_dim);
    if (s.rank() != cfg.chain[i].rank()) {
      tamper(path + " differs from the configuration");
    }
    for (Index c = 0; c < s.rank(); ++c) {
      if (!member(s.basis().col(c), cfg.chain[i], 1e-9)) tamper(path + " differs from the configuration");
    }
    chain.subspaces.push_back(s);
  }

  if (cfg.mode == Mode::Converge) {
    const Json& conv = field(field(report, "findings", "findings"), "convergence", "findings.convergence");
    const auto points = as_vector_list(field(conv, "points", "findings.convergence.points"),
                                       "findings.convergence.points");
    const Json& entries = as_array(field(conv, "entries", "findings.convergence.entries"),
                                   "findings.convergence.entries");
    if (points.size() != cfg.ns.size()) tamper("convergence points do not match ns");
    std::size_t k = 0;
    for (std::size_t a = 0; a < points.size(); ++a) {
      for (std::size_t b = a + 1; b < points.size(); ++b, ++k) {
        if (k >= entries.size()) tamper("convergence table is truncated");
        const std::string path = "findings.convergence.entries[" + std::to_string(k) + "]";
        const double stored = as_number(field(entries[k], "distance", path + ".distance"), path + ".distance");
        if (!close(stored, norm_of(points[a] - points[b], cfg.norm), kReplayTolerance)) {
          tamper(path + ".distance does not match the replay");
        }
        ++out.findings_checked;
      }
    }
    if (k != entries.size()) tamper("convergence table has extra entries");
    if (!points.empty() && (x.size() != points.back().size() || x != points.back())) {
      tamper("point differs from the last convergence point");
    }
    if (verdict != "pass") tamper("convergence reports always carry a passing verdict");
    return out;
  }

  if (x.size() != cfg.ambient_dim) schema_error("point", "length differs from ambient_dim");
  const Json& rows = as_array(field(report, "rows", "rows"), "rows");
  if (rows.size() != chain.size()) tamper("row count differs from the chain length");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string path = "rows[" + std::to_string(i) + "]";
    const Json& row = as_object(rows[i], path);
    const auto n = as_integer(field(row, "n", path + ".n"), path + ".n");
    if (n != static_cast<std::int64_t>(i + 1)) tamper(path + ".n is out of order");
    const double d = as_number(field(row, "d_n", path + ".d_n"), path + ".d_n");
    if (!close(d, cfg.sequence->value(i), 1e-15)) tamper(path + ".d_n differs from the configured sequence");
    const auto [lo, hi] = band_for(cfg, d);
    const ReportRow fresh = certify_row(x, chain[i], i + 1, d, lo, hi, cfg.norm);
    const std::pair<const char*, double> checks[] = {{"rho", fresh.rho},
                                                     {"cert_lower", fresh.cert_lower},
                                                     {"cert_upper", fresh.cert_upper},
                                                     {"ratio", fresh.ratio},
                                                     {"target_lo", lo},
                                                     {"target_hi", hi}};
    for (const auto& [key, value] : checks) {
      const std::string p = path + "." + key;
      if (!close(stored_number(field(row, key, p), p), value, kReplayTolerance)) {
        tamper(p + " does not match the replayed certificate");
      }
    }
    if (field(row, "pass", path + ".pass") != Json(fresh.pass)) tamper(path + ".pass does not match the replay");
    out.pass = out.pass && fresh.pass;
    out.rows.push_back(fresh);
    ++out.rows_checked;
  }
  if ((verdict == "pass") != out.pass) tamper("verdict does not match the replayed rows");
  return out;
}

VerifyOutcome verify_report(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  return verify_report(doc);
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::SchemaError:
    case ErrorKind::CrossFieldError:
    case ErrorKind::IoError:
      return 3;
    case ErrorKind::InsufficientGaps:
    case ErrorKind::NoAdmissibleStart:
    case ErrorKind::HeadTies:
    case ErrorKind::PreconditionViolation:
    case ErrorKind::BaseTooSmall:
    case ErrorKind::NotStrictlyDecreasing:
    case ErrorKind::DegenerateTarget:
    case ErrorKind::AnchorInsideTop:
    case ErrorKind::InvalidArgument:
    case ErrorKind::DimMismatch:
    case ErrorKind::NonIncreasingDims:
    case ErrorKind::DimExceedsAmbient:
    case ErrorKind::LinearlyDependentBasis:
      return 2;
    default:
      return 1;
  }
}

BatchSummary run_batch(const fs::path& dir, const std::optional<fs::path>& out, unsigned threads) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::IoError, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (out) fs::create_directories(*out);

  if (threads == 0) {
    threads = 1;
    if (const char* env = std::getenv("LETHARGY_THREADS")) {
      const int n = std::atoi(env);
      if (n > 0) threads = static_cast<unsigned>(n);
    }
  }

  BatchSummary summary;
  summary.entries.resize(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      BatchEntry& e = summary.entries[i];
      e.name = files[i].stem().string();
      const auto started = std::chrono::steady_clock::now();
      try {
        const RunConfig cfg = load_config(files[i]);
        e.mode = std::string(to_string(cfg.mode));
        e.norm = std::string(to_string(cfg.norm));
        const Report report = run_scenario(cfg);
        e.pass = report.pass;
        e.exit_code = report.pass ? 0 : 1;
        if (out) {
          write_report(report, *out / (e.name + ".report.json"));
          write_csv(report, *out / (e.name + ".csv"));
        }
      } catch (const Error& err) {
        e.exit_code = exit_code_for(err.kind());
        e.message = err.what();
      } catch (const std::exception& err) {
        e.exit_code = 1;
        e.message = err.what();
      }
      e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const BatchEntry& e : summary.entries) summary.exit_code = std::max(summary.exit_code, e.exit_code);
  return summary;
}

std::string format_summary(const BatchSummary& summary) {
  std::ostringstream out;
  out << "scenario                         mode      norm  verdict  exit   seconds\n";
  for (const BatchEntry& e : summary.entries) {
    char line[256];
    std::snprintf(line, sizeof line, "%-32s %-9s %-5s %-8s %4d %9.3f", e.name.c_str(), e.mode.c_str(),
                  e.norm.c_str(), e.exit_code == 0 ? "pass" : "fail", e.exit_code, e.seconds);
    out << line;
    if (!e.message.empty()) out << "  " << e.message;
    out << '\n';
  }
  return out.str();
}

}  // namespace lethargy
