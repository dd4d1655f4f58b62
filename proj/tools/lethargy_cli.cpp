#include "lethargy/harness.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

using namespace lethargy;

namespace {

int report_error(const std::exception& e, int code) {
  std::cerr << "lethargy: " << e.what() << '\n';
  return code;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return report_error(e, exit_code_for(e.kind()));
  } catch (const Json::exception& e) {
    return report_error(e, 3);
  } catch (const std::exception& e) {
    return report_error(e, 1);
  }
}

int cmd_run(const std::string& config, const std::optional<std::string>& csv, std::optional<double> tol,
            const std::optional<std::string>& report_path) {
  RunConfig cfg = load_config(config);
  if (tol) {
    if (!(*tol > 0.0)) throw Error(ErrorKind::SchemaError, "--tol: must be positive");
    cfg.tolerances.accept = *tol;
  }
  const Report report = run_scenario(cfg);
  if (report_path) {
    write_report(report, *report_path);
  } else {
    std::cout << report.doc.dump(2) << '\n';
  }
  if (csv) write_csv(report, *csv);
  std::cerr << cfg.name << ": " << to_string(cfg.mode) << " " << to_string(cfg.norm) << " -> "
            << (report.pass ? "pass" : "fail") << '\n';
  return report.pass ? 0 : 1;
}

int cmd_verify(const std::string& path) {
  const VerifyOutcome out = verify_report(std::filesystem::path(path));
  std::cout << path << ": " << (out.pass ? "pass" : "fail") << " (" << out.rows_checked << " rows, "
            << out.findings_checked << " findings replayed)\n";
  return out.pass ? 0 : 1;
}

int cmd_probe(const std::string& config) {
  const RunConfig cfg = load_config(config);
  if (cfg.mode != Mode::Probe) {
    throw Error(ErrorKind::CrossFieldError, "mode: the probe command needs a probe-mode config");
  }
  const Report report = run_scenario(cfg);
  for (const Json& p : report.doc["findings"]["probes"]) {
    std::cout << p["name"].get<std::string>() << " " << p["norm"].get<std::string>()
              << " nu=" << format_number(p["nu"].get<double>())
              << " required=" << format_number(p["required_norm"].get<double>())
              << " achieved=" << format_number(p["achieved_norm"].get<double>())
              << " margin=" << format_number(p["margin"].get<double>())
              << " feasible=" << (p["feasible"].get<bool>() ? "true" : "false") << '\n';
  }
  return 0;
}

int cmd_batch(const std::string& dir, const std::optional<std::string>& out, unsigned threads) {
  std::optional<std::filesystem::path> out_dir;
  if (out) out_dir = *out;
  const BatchSummary summary = run_batch(dir, out_dir, threads);
  std::cout << format_summary(summary);
  return summary.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elements with prescribed distances to nested subspace chains"};
  app.set_version_flag("--version", std::string(LETHARGY_VERSION));
  app.require_subcommand(1);

  std::string config;
  std::optional<std::string> csv;
  std::optional<double> tol;
  std::optional<std::string> report_path;
  auto* run = app.add_subcommand("run", "Run one scenario and print or write its report");
  run->add_option("config", config, "Scenario configuration (JSON)")->required();
  run->add_option("--emit-csv", csv, "Write the per-index rows as CSV");
  run->add_option("--tol", tol, "Override the acceptance tolerance");
  run->add_option("--report", report_path, "Write the report here instead of stdout");

  std::string report;
  auto* verify = app.add_subcommand("verify", "Replay the certificates stored in a report");
  verify->add_option("report", report, "Report written by run")->required();

  std::string probe_config;
  auto* probe = app.add_subcommand("probe", "Evaluate dual-extension probes");
  probe->add_option("config", probe_config, "Probe-mode configuration")->required();

  std::string dir;
  std::optional<std::string> out;
  unsigned threads = 0;
  auto* batch = app.add_subcommand("batch", "Run every configuration in a directory");
  batch->add_option("dir", dir, "Directory of *.json configurations")->required();
  batch->add_option("--out", out, "Directory for reports and CSVs");
  batch->add_option("--threads", threads, "Worker threads (default: LETHARGY_THREADS or 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  if (*run) return guarded([&] { return cmd_run(config, csv, tol, report_path); });
  if (*verify) return guarded([&] { return cmd_verify(report); });
  if (*probe) return guarded([&] { return cmd_probe(probe_config); });
  return guarded([&] { return cmd_batch(dir, out, threads); });
}
