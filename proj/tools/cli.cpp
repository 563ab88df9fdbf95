#include "cli.hpp"

#include <atomic>
#include <csignal>
#include <map>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "corae/log_format.hpp"
#include "corae/report.hpp"
#include "corae/service/http_server.hpp"
#include "corae/service/session_service.hpp"

namespace corae::cli {

namespace fs = std::filesystem;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return buf.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing " + path.string());
}

int cmd_validate(const fs::path& path, int fps, std::ostream& out) {
  const auto text = read_file(path);
  LegacyImportOptions legacy;
  legacy.frame_rate = FrameRate(fps);
  auto loaded = log_load_any(text, legacy);
  if (loaded.legacy) out << "notice: imported legacy pair format; causes inferred from rating changes\n";
  const auto violations = validate_log(loaded.log);
  if (violations.empty()) {
    out << "ok: " << loaded.log.records.size() << " records\n";
    return kSuccess;
  }
  for (const auto& v : violations) out << v.message << "\n";
  return kFailure;
}

int cmd_import(const fs::path& input, const fs::path& output, const LegacyImportOptions& options, std::ostream& out) {
  const auto text = read_file(input);
  auto loaded = log_load_any(text, options);
  const auto violations = validate_log(loaded.log);
  if (!violations.empty()) {
    for (const auto& v : violations) out << v.message << "\n";
    return kFailure;
  }
  write_file(output, log_serialize(loaded.log));
  out << "wrote " << output.string() << " (" << loaded.log.records.size() << " records)\n";
  return kSuccess;
}

void print_summary(const AnalysisReport& report, std::ostream& out) {
  std::map<EventKind, int> counts;
  for (const auto& e : report.events) ++counts[e.kind];
  out << "grid: " << report.size() << " points, step " << format_number(report.ir_a.step) << " s\n";
  out << std::left << std::setw(20) << "kind" << std::setw(8) << "subject" << std::setw(12) << "start" << "end\n";
  for (const auto& e : report.events) {
    out << std::left << std::setw(20) << to_string(e.kind) << std::setw(8) << to_string(e.subject) << std::setw(12)
        << format_number(e.start) << format_number(e.end) << "\n";
  }
  out << "summary:";
  for (auto kind : {EventKind::crossing, EventKind::drop_rebound, EventKind::opposing_trends, EventKind::plateau,
                    EventKind::synchrony_window, EventKind::opposition_window}) {
    out << " " << to_string(kind) << "=" << counts[kind];
  }
  out << "\n";
}

int cmd_analyze(const fs::path& a, const fs::path& b, const fs::path& output, const DetectorConfig& cfg,
                const AnalysisOptions& options, std::ostream& out) {
  const auto text_a = read_file(a);
  const auto text_b = read_file(b);
  const auto log_a = log_parse(text_a);
  const auto log_b = log_parse(text_b);
  const auto report = analyze_session(log_a, log_b, cfg, options);
  write_file(output, report_to_json(report));
  print_summary(report, out);
  out << "wrote " << output.string() << "\n";
  return kSuccess;
}

int cmd_export(const fs::path& report_path, const std::string& format, const fs::path& dir, std::ostream& out) {
  const auto report = report_from_json(read_file(report_path));
  if (format == "csv") {
    write_file(dir / "series.csv", export_series_csv(report));
  } else {
    write_file(dir / "series.json", export_series_json(report));
  }
  write_file(dir / "events.csv", export_events_csv(report));
  out << "exported " << report.size() << " rows and " << report.events.size() << " events to " << dir.string()
      << "\n";
  return kSuccess;
}

std::atomic<service::HttpServer*> g_server{nullptr};

extern "C" void handle_stop_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

int cmd_serve(const std::optional<fs::path>& config_path, const std::optional<int>& port,
              const std::optional<std::string>& listen, const std::optional<fs::path>& data_dir, std::ostream& out) {
  auto config = service::load_service_config(config_path);
  if (port) config.port = *port;
  if (listen) config.listen_address = *listen;
  if (data_dir) config.data_dir = *data_dir;
  config.validate();

  service::SessionService sessions(config, std::make_unique<service::FileSessionStore>(config.data_dir));
  service::HttpServer server(sessions);
  const int bound = server.bind(config.listen_address, config.port);
  if (bound < 0) throw IoError("cannot listen on " + config.listen_address + ":" + std::to_string(config.port));
  g_server.store(&server);
  std::signal(SIGINT, handle_stop_signal);
  std::signal(SIGTERM, handle_stop_signal);
  out << "listening on " << config.listen_address << ":" << bound << " (data: " << config.data_dir.string() << ", "
      << sessions.session_count() << " sessions loaded)" << std::endl;
  server.listen();
  g_server.store(nullptr);
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"corae: continuous retrospective affect annotation"};
  app.require_subcommand(1);

  auto* serve = app.add_subcommand("serve", "Run the annotation service");
  std::optional<fs::path> config_path;
  std::optional<int> port;
  std::optional<std::string> listen;
  std::optional<fs::path> data_dir;
  serve->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  serve->add_option("--port", port, "Listen port (overrides config)");
  serve->add_option("--listen", listen, "Listen address (overrides config)");
  serve->add_option("--data-dir", data_dir, "Data directory (overrides config)");

  auto* validate = app.add_subcommand("validate", "Check a log file against every log invariant");
  fs::path validate_path;
  int validate_fps = FrameRate::kDefault;
  validate->add_option("log", validate_path, "Log file")->required();
  validate->add_option("--fps", validate_fps, "Frame rate for legacy pair-format files")->check(CLI::PositiveNumber);

  auto* import = app.add_subcommand("import", "Convert a legacy pair-format log to the canonical format");
  fs::path import_in, import_out;
  LegacyImportOptions legacy;
  int import_fps = FrameRate::kDefault;
  import->add_option("legacy", import_in, "Legacy log file")->required();
  import->add_option("-o,--output", import_out, "Canonical output file")->required();
  import->add_option("--fps", import_fps, "Frame rate")->check(CLI::PositiveNumber);
  import->add_option("--participant", legacy.participant_id, "Participant identifier");
  import->add_option("--session", legacy.session_id, "Session identifier");
  import->add_option("--interval", legacy.interval_seconds, "Interval logging period in seconds");
  import->add_option("--scale-min", legacy.scale.min, "Lowest rating");
  import->add_option("--scale-max", legacy.scale.max, "Highest rating");

  auto* analyze = app.add_subcommand("analyze", "Compute IR/CIR curves and detect events for two logs");
  fs::path log_a, log_b, report_out = "report.json";
  DetectorConfig cfg;
  std::optional<double> opposition;
  AnalysisOptions options;
  analyze->add_option("a", log_a, "First participant's log")->required();
  analyze->add_option("b", log_b, "Second participant's log")->required();
  analyze->add_option("-o,--output", report_out, "Report file")->capture_default_str();
  analyze->add_option("--window", cfg.window_seconds, "Analysis window in seconds")->capture_default_str();
  analyze->add_option("--slope", cfg.slope_threshold, "CIR slope threshold (rating/s)")->capture_default_str();
  analyze->add_option("--plateau-eps", cfg.plateau_epsilon, "Plateau slope tolerance")->capture_default_str();
  analyze->add_option("--sync", cfg.sync_correlation_threshold, "Synchrony correlation threshold")->capture_default_str();
  analyze->add_option("--opposition", opposition, "Opposition correlation threshold (default: -sync)");
  analyze->add_option("--lag", cfg.rebound_max_lag, "Max drop/rebound lag in seconds")->capture_default_str();
  analyze->add_option("--ratio", cfg.opposing_slope_ratio_tolerance, "Opposing slope ratio tolerance")
      ->capture_default_str();
  analyze->add_option("--step", options.step, "Grid step in seconds")->capture_default_str();
  analyze->add_option("--duration", options.duration, "Analyze up to this time instead of the log overlap");

  auto* exp = app.add_subcommand("export", "Write plot-ready series and an events sidecar");
  fs::path export_in, export_dir = ".";
  std::string format = "csv";
  exp->add_option("report", export_in, "Report file from `analyze`")->required();
  exp->add_option("--format", format, "csv or series-json")->check(CLI::IsMember({"csv", "series-json"}))
      ->capture_default_str();
  exp->add_option("-o,--output", export_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream cli_out, cli_err;
    const int code = app.exit(e, cli_out, cli_err);
    out << cli_out.str();
    err << cli_err.str();
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*serve) return cmd_serve(config_path, port, listen, data_dir, out);
    if (*validate) return cmd_validate(validate_path, validate_fps, out);
    if (*import) {
      legacy.frame_rate = FrameRate(import_fps);
      return cmd_import(import_in, import_out, legacy, out);
    }
    if (*analyze) {
      cfg.opposition_correlation_threshold = opposition.value_or(-cfg.sync_correlation_threshold);
      try {
        cfg.validate(options.step);
      } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
      }
      return cmd_analyze(log_a, log_b, report_out, cfg, options, out);
    }
    if (*exp) return cmd_export(export_in, format, export_dir, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const LogError& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}

}  // namespace corae::cli
