#include "corae/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "corae/error.hpp"
#include "json.hpp"

namespace corae {

using ojson = nlohmann::ordered_json;

AnalysisReport analyze_session(const AnnotationLog& log_a, const AnnotationLog& log_b, const DetectorConfig& cfg,
                               const AnalysisOptions& options) {
  if (log_a.frame_rate != log_b.frame_rate) {
    throw AnalysisError("logs use different frame rates (" + std::to_string(log_a.frame_rate.fps()) + " vs " +
                        std::to_string(log_b.frame_rate.fps()) + ")");
  }
  require_valid(log_a);
  require_valid(log_b);
  cfg.validate(options.step);

  const double duration =
      options.duration.value_or(std::min(log_a.records.back().timecode.total_seconds(),
                                         log_b.records.back().timecode.total_seconds()));
  if (!(duration + 1e-9 >= options.step)) {
    throw AnalysisError("logs overlap for less than one grid step");
  }

  AnalysisReport report;
  report.session_id = log_a.session_id;
  report.participant_a = log_a.participant_id;
  report.participant_b = log_b.participant_id;
  report.config = cfg;
  report.ir_a = resample(log_a, options.step, duration).series;
  report.ir_b = resample(log_b, options.step, duration).series;
  report.cir_a = cumulative(report.ir_a);
  report.cir_b = cumulative(report.ir_b);

  auto& events = report.events;
  auto append = [&events](std::vector<DetectedEvent> more) {
    events.insert(events.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  };
  append(detect_crossings(report.cir_a, report.cir_b));
  append(detect_drop_rebound(report.cir_a, report.cir_b, cfg));
  append(detect_opposing_trends(report.cir_a, report.cir_b, cfg));
  append(detect_joint_plateaus(report.cir_a, report.cir_b, cfg));
  auto sync = synchrony_score(report.ir_a, report.ir_b, cfg);
  report.correlation = std::move(sync.correlation);
  append(std::move(sync.events));
  std::stable_sort(events.begin(), events.end(), event_order);
  return report;
}

std::string format_number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    return buf;
  }
  return ojson(v).dump();
}

namespace {

ojson config_json(const DetectorConfig& c) {
  ojson j;
  j["window_seconds"] = c.window_seconds;
  j["slope_threshold"] = c.slope_threshold;
  j["plateau_epsilon"] = c.plateau_epsilon;
  j["sync_correlation_threshold"] = c.sync_correlation_threshold;
  j["opposition_correlation_threshold"] = c.opposition_correlation_threshold;
  j["rebound_max_lag"] = c.rebound_max_lag;
  j["opposing_slope_ratio_tolerance"] = c.opposing_slope_ratio_tolerance;
  return j;
}

DetectorConfig config_from_json(const ojson& j) {
  DetectorConfig c;
  c.window_seconds = j.at("window_seconds").get<double>();
  c.slope_threshold = j.at("slope_threshold").get<double>();
  c.plateau_epsilon = j.at("plateau_epsilon").get<double>();
  c.sync_correlation_threshold = j.at("sync_correlation_threshold").get<double>();
  c.opposition_correlation_threshold = j.at("opposition_correlation_threshold").get<double>();
  c.rebound_max_lag = j.at("rebound_max_lag").get<double>();
  c.opposing_slope_ratio_tolerance = j.at("opposing_slope_ratio_tolerance").get<double>();
  return c;
}

}  // namespace

std::string report_to_json(const AnalysisReport& r) {
  ojson doc;
  doc["version"] = AnalysisReport::kVersion;
  doc["session_id"] = r.session_id;
  doc["participants"] = {{"a", r.participant_a}, {"b", r.participant_b}};
  doc["config"] = config_json(r.config);
  doc["grid"] = {{"start", r.ir_a.start_time}, {"step", r.ir_a.step}, {"count", r.size()}};

  ojson series;
  series["ir_a"] = r.ir_a.values;
  series["ir_b"] = r.ir_b.values;
  series["cir_a"] = r.cir_a.values;
  series["cir_b"] = r.cir_b.values;
  ojson corr = ojson::array();
  for (const auto& c : r.correlation) corr.push_back(c ? ojson(*c) : ojson(nullptr));
  series["correlation"] = std::move(corr);
  doc["series"] = std::move(series);

  ojson events = ojson::array();
  for (const auto& e : r.events) {
    ojson ev;
    ev["kind"] = to_string(e.kind);
    ev["subject"] = to_string(e.subject);
    ev["start"] = e.start;
    ev["end"] = e.end;
    ojson params = ojson::object();
    for (const auto& [k, v] : e.params) params[k] = v;
    ev["params"] = std::move(params);
    events.push_back(std::move(ev));
  }
  doc["events"] = std::move(events);
  return doc.dump(2) + "\n";
}

AnalysisReport report_from_json(std::string_view data) {
  try {
    const auto doc = ojson::parse(data.begin(), data.end());
    if (doc.at("version").get<std::string>() != AnalysisReport::kVersion) {
      throw AnalysisError("unsupported report version");
    }
    AnalysisReport r;
    r.session_id = doc.at("session_id").get<std::string>();
    r.participant_a = doc.at("participants").at("a").get<std::string>();
    r.participant_b = doc.at("participants").at("b").get<std::string>();
    r.config = config_from_json(doc.at("config"));
    const auto& grid = doc.at("grid");
    const double start = grid.at("start").get<double>();
    const double step = grid.at("step").get<double>();
    const auto count = grid.at("count").get<std::size_t>();
    const auto& series = doc.at("series");
    r.ir_a = {start, step, series.at("ir_a").get<std::vector<int>>()};
    r.ir_b = {start, step, series.at("ir_b").get<std::vector<int>>()};
    r.cir_a = {start, step, series.at("cir_a").get<std::vector<std::int64_t>>()};
    r.cir_b = {start, step, series.at("cir_b").get<std::vector<std::int64_t>>()};
    for (const auto& c : series.at("correlation")) {
      r.correlation.push_back(c.is_null() ? std::nullopt : std::optional<double>(c.get<double>()));
    }
    if (r.ir_a.values.size() != count || r.ir_b.values.size() != count || r.cir_a.values.size() != count ||
        r.cir_b.values.size() != count || r.correlation.size() != count) {
      throw AnalysisError("report series lengths disagree with grid count");
    }
    for (const auto& e : doc.at("events")) {
      DetectedEvent ev;
      ev.kind = parse_event_kind(e.at("kind").get<std::string>());
      ev.subject = parse_subject(e.at("subject").get<std::string>());
      ev.start = e.at("start").get<double>();
      ev.end = e.at("end").get<double>();
      for (const auto& [k, v] : e.at("params").items()) ev.params[k] = v.get<double>();
      r.events.push_back(std::move(ev));
    }
    return r;
  } catch (const ojson::exception& e) {
    throw AnalysisError(std::string("malformed report: ") + e.what());
  }
}

std::string export_series_csv(const AnalysisReport& r) {
  std::string out = "t,ir_a,ir_b,cir_a,cir_b\n";
  for (std::size_t k = 0; k < r.size(); ++k) {
    out += format_number(r.ir_a.time_at(k));
    out += ',' + std::to_string(r.ir_a.values[k]);
    out += ',' + std::to_string(r.ir_b.values[k]);
    out += ',' + std::to_string(r.cir_a.values[k]);
    out += ',' + std::to_string(r.cir_b.values[k]);
    out += '\n';
  }
  return out;
}

std::string export_events_csv(const AnalysisReport& r) {
  std::string out = "kind,subject,start,end,params\n";
  for (const auto& e : r.events) {
    out += std::string(to_string(e.kind)) + ',' + std::string(to_string(e.subject)) + ',' + format_number(e.start) +
           ',' + format_number(e.end) + ',';
    bool first = true;
    for (const auto& [k, v] : e.params) {
      if (!first) out += ';';
      out += k + '=' + format_number(v);
      first = false;
    }
    out += '\n';
  }
  return out;
}

std::string export_series_json(const AnalysisReport& r) {
  ojson doc;
  std::vector<double> t(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) t[k] = r.ir_a.time_at(k);
  doc["t"] = t;
  doc["ir_a"] = r.ir_a.values;
  doc["ir_b"] = r.ir_b.values;
  doc["cir_a"] = r.cir_a.values;
  doc["cir_b"] = r.cir_b.values;
  ojson corr = ojson::array();
  for (const auto& c : r.correlation) corr.push_back(c ? ojson(*c) : ojson(nullptr));
  doc["correlation"] = std::move(corr);
  return doc.dump() + "\n";
}

}  // namespace corae
