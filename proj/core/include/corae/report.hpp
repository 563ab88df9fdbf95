#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corae/analysis.hpp"
#include "corae/detectors.hpp"

namespace corae {

struct AnalysisOptions {
  double step = 1.0;
  // Analyze up to this time instead of the shorter log's last record.
  std::optional<double> duration;
};

struct AnalysisReport {
  static constexpr std::string_view kVersion = "1";

  std::string session_id;
  std::string participant_a;
  std::string participant_b;
  DetectorConfig config;
  RatingSeries ir_a;
  RatingSeries ir_b;
  CirSeries cir_a;
  CirSeries cir_b;
  std::vector<std::optional<double>> correlation;
  std::vector<DetectedEvent> events;

  std::size_t size() const noexcept { return ir_a.values.size(); }

  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

// Both curves, their CIRs and every detector, restricted to the overlap of the logs.
AnalysisReport analyze_session(const AnnotationLog& log_a, const AnnotationLog& log_b,
                               const DetectorConfig& cfg = {}, const AnalysisOptions& options = {});

std::string report_to_json(const AnalysisReport& report);
AnalysisReport report_from_json(std::string_view data);

// Aligned columns t,ir_a,ir_b,cir_a,cir_b with a header row.
std::string export_series_csv(const AnalysisReport& report);
// kind,subject,start,end,params with a header row; one row per event.
std::string export_events_csv(const AnalysisReport& report);
// Arrays for plotting: t, ir_a, ir_b, cir_a, cir_b, correlation.
std::string export_series_json(const AnalysisReport& report);

// Formats a double the shortest way that parses back to the same value.
std::string format_number(double v);

}  // namespace corae
