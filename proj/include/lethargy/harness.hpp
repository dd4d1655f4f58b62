#pragma once

#include "lethargy/engine.hpp"
#include "lethargy/error.hpp"
#include "lethargy/pair.hpp"
#include "lethargy/space.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lethargy {

using Json = nlohmann::json;

enum class Mode { Exact, Konyagin, Probe, Finite, Converge };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view tag);

struct Tolerances {
  /// Pivot tolerance of the LP solver.
  double solver = 1e-11;
  /// Relative value tolerance of every bracketed root search.
  double root = kRootTolerance;
  /// exact/finite: relative band on d_n; konyagin and eps runs: absolute slack.
  double accept = 1e-6;
};

struct ProbeInput {
  std::string name;
  NormKind norm = NormKind::L2;
  Vector x1;
  Vector x2;
  /// Basis of Q, possibly empty.
  std::vector<Vector> q;
  double delta = 0.0;
  Orientation orientation = Orientation::Minus;
};

struct RunConfig {
  std::string name;
  NormKind norm = NormKind::L2;
  Mode mode = Mode::Exact;
  Index ambient_dim = 0;
  Chain chain;
  std::optional<DeviationSequence> sequence;
  std::optional<double> c;
  double base = 2.0;
  std::optional<double> eps;
  Tolerances tolerances;
  std::uint64_t seed = 0;
  std::vector<ProbeInput> probes;
  std::vector<std::size_t> ns;
  std::optional<Vector> anchor;
  /// The configuration as read, embedded in reports.
  Json source;
};

/// Throws ParseError (not JSON), SchemaError (missing or mistyped field, named
/// by its path) or CrossFieldError (fields that do not fit together).
RunConfig parse_config(const Json& doc);
/// Throws IoError when the file cannot be read, then as parse_config.
RunConfig load_config(const std::filesystem::path& path);

struct Report {
  Json doc;
  std::vector<ReportRow> rows;
  bool pass = false;
};

/// Runs the configured mode and re-certifies every distance before the verdict.
Report run_scenario(const RunConfig& cfg);

/// 64-bit FNV-1a of the canonical dump of the configuration.
std::string config_hash(const Json& config);

/// Shortest text giving 17 significant digits, independent of the locale.
std::string format_number(double value);
std::string rows_csv(const std::vector<ReportRow>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_report(const Report& report, const std::filesystem::path& path);
void write_csv(const Report& report, const std::filesystem::path& path);

struct VerifyOutcome {
  bool pass = false;
  std::size_t rows_checked = 0;
  std::size_t findings_checked = 0;
  std::vector<ReportRow> rows;
};

/// Replays a report from its embedded point, chain and configuration.
/// Throws TamperDetected when a stored value disagrees with the replay,
/// SchemaError when required fields are missing.
VerifyOutcome verify_report(const Json& report);
VerifyOutcome verify_report(const std::filesystem::path& path);

/// 0 pass, 1 certified violation or solver breakdown, 2 infeasible input,
/// 3 configuration error.
int exit_code_for(ErrorKind kind);

struct BatchEntry {
  std::string name;
  std::string mode;
  std::string norm;
  bool pass = false;
  int exit_code = 0;
  double seconds = 0.0;
  std::string message;
};

struct BatchSummary {
  std::vector<BatchEntry> entries;
  int exit_code = 0;
};

/// Runs every *.json file of `dir` (sorted by name) independently. Reports and
/// CSVs go to `out` when given. Threads: `threads`, or the LETHARGY_THREADS
/// environment variable when `threads` is 0, else 1.
BatchSummary run_batch(const std::filesystem::path& dir, const std::optional<std::filesystem::path>& out,
                       unsigned threads = 0);
std::string format_summary(const BatchSummary& summary);

}  // namespace lethargy
