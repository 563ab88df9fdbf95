#include "corae/log_format.hpp"

#include <limits>

#include "corae/error.hpp"
#include "json.hpp"

namespace corae {

using nlohmann::json;

namespace {

std::string quote(const std::string& s) {
  return json(s).dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string number(double v) { return json(v).dump(); }

void write_record(std::string& out, const AnnotationRecord& r) {
  out += "{\"rating\": ";
  out += std::to_string(r.rating.value);
  out += ", \"timecode\": \"";
  out += r.timecode.to_string();
  out += "\", \"cause\": \"";
  out += to_string(r.cause);
  out += "\"}";
}

const json& member(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw LogError(std::string("missing field '") + key + "'");
  return *it;
}

int to_int(const json& v, const char* what, std::optional<std::size_t> index = std::nullopt) {
  if (!v.is_number_integer()) throw LogError(std::string(what) + " must be an integer", index);
  const auto wide = v.get<std::int64_t>();
  if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max()) {
    throw LogError(std::string(what) + " out of range", index);
  }
  return static_cast<int>(wide);
}

std::string to_str(const json& v, const char* what) {
  if (!v.is_string()) throw LogError(std::string(what) + " must be a string");
  return v.get<std::string>();
}

json parse_json(std::string_view data) {
  try {
    return json::parse(data.begin(), data.end());
  } catch (const json::parse_error& e) {
    throw LogError(std::string("malformed JSON: ") + e.what());
  }
}

Timecode parse_timecode_at(const json& v, FrameRate rate, std::size_t index) {
  if (!v.is_string()) throw LogError("timecode must be a string", index);
  try {
    return Timecode::parse(v.get_ref<const std::string&>(), rate);
  } catch (const TimecodeError& e) {
    throw LogError(e.what(), index);
  }
}

AnnotationLog from_document(const json& doc) {
  if (!doc.is_object()) throw LogError("log document must be a JSON object");
  AnnotationLog log;
  log.version = to_str(member(doc, "version"), "version");
  log.session_id = to_str(member(doc, "session_id"), "session_id");
  log.participant_id = to_str(member(doc, "participant_id"), "participant_id");
  const int fps = to_int(member(doc, "frame_rate"), "frame_rate");
  if (fps < 1) throw LogError("frame_rate must be >= 1");
  log.frame_rate = FrameRate(fps);

  const auto& scale = member(doc, "scale");
  if (!scale.is_object()) throw LogError("scale must be an object");
  log.scale.min = to_int(member(scale, "min"), "scale.min");
  log.scale.max = to_int(member(scale, "max"), "scale.max");
  if (auto labels = scale.find("labels"); labels != scale.end()) {
    if (!labels->is_object()) throw LogError("scale.labels must be an object");
    log.scale.min_label = to_str(member(*labels, "min"), "scale.labels.min");
    log.scale.neutral_label = to_str(member(*labels, "neutral"), "scale.labels.neutral");
    log.scale.max_label = to_str(member(*labels, "max"), "scale.labels.max");
  }

  const auto& interval = member(doc, "interval_seconds");
  if (!interval.is_number()) throw LogError("interval_seconds must be a number");
  log.interval_seconds = interval.get<double>();

  const auto& annotations = member(doc, "annotations");
  if (!annotations.is_array()) throw LogError("annotations must be an array");
  log.records.reserve(annotations.size());
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const auto& item = annotations[i];
    if (!item.is_object()) throw LogError("annotation must be an object", i);
    AnnotationRecord rec;
    auto field = [&](const char* key) -> const json& {
      auto it = item.find(key);
      if (it == item.end()) throw LogError(std::string("annotation missing '") + key + "'", i);
      return *it;
    };
    rec.rating.value = to_int(field("rating"), "rating", i);
    rec.timecode = parse_timecode_at(field("timecode"), log.frame_rate, i);
    const auto& cause = field("cause");
    if (!cause.is_string()) throw LogError("cause must be a string", i);
    try {
      rec.cause = parse_record_cause(cause.get_ref<const std::string&>());
    } catch (const LogError& e) {
      throw LogError(e.what(), i);
    }
    log.records.push_back(rec);
  }
  return log;
}

}  // namespace

std::string log_serialize(const AnnotationLog& log) {
  std::string out;
  out.reserve(256 + log.records.size() * 64);
  out += "{\n";
  out += "  \"version\": " + quote(log.version) + ",\n";
  out += "  \"session_id\": " + quote(log.session_id) + ",\n";
  out += "  \"participant_id\": " + quote(log.participant_id) + ",\n";
  out += "  \"frame_rate\": " + std::to_string(log.frame_rate.fps()) + ",\n";
  out += "  \"scale\": {\"min\": " + std::to_string(log.scale.min) +
         ", \"max\": " + std::to_string(log.scale.max);
  if (!log.scale.has_default_labels()) {
    out += ", \"labels\": {\"min\": " + quote(log.scale.min_label) +
           ", \"neutral\": " + quote(log.scale.neutral_label) + ", \"max\": " + quote(log.scale.max_label) +
           "}";
  }
  out += "},\n";
  out += "  \"interval_seconds\": " + number(log.interval_seconds) + ",\n";
  if (log.records.empty()) {
    out += "  \"annotations\": []\n";
  } else {
    out += "  \"annotations\": [\n";
    for (std::size_t i = 0; i < log.records.size(); ++i) {
      out += "    ";
      write_record(out, log.records[i]);
      out += i + 1 < log.records.size() ? ",\n" : "\n";
    }
    out += "  ]\n";
  }
  out += "}\n";
  return out;
}

AnnotationLog log_parse_unchecked(std::string_view data) { return from_document(parse_json(data)); }

AnnotationLog log_parse(std::string_view data) {
  auto log = log_parse_unchecked(data);
  require_valid(log);
  return log;
}

bool is_legacy_document(std::string_view data) {
  for (char c : data) {
    if (c == ' ' || c == '\n' || c == '\r' || c == '\t') continue;
    return c == '[';
  }
  return false;
}

AnnotationLog log_import_legacy(std::string_view data, const LegacyImportOptions& options) {
  const auto doc = parse_json(data);
  if (!doc.is_array()) throw LogError("legacy log must be a JSON array of {\"<rating>\": \"<timecode>\"} pairs");

  AnnotationLog log;
  log.session_id = options.session_id;
  log.participant_id = options.participant_id;
  log.frame_rate = options.frame_rate;
  log.scale = options.scale;
  log.interval_seconds = options.interval_seconds;
  log.records.reserve(doc.size());

  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& pair = doc[i];
    if (!pair.is_object() || pair.size() != 1) {
      throw LogError("legacy entry must be an object with exactly one key", i);
    }
    const auto entry = pair.begin();
    const std::string key = entry.key();
    const auto& value = entry.value();
    AnnotationRecord rec;
    try {
      std::size_t used = 0;
      rec.rating.value = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw LogError("legacy rating key '" + key + "' is not an integer", i);
    }
    rec.timecode = parse_timecode_at(value, log.frame_rate, i);
    rec.cause = (!log.records.empty() && log.records.back().rating != rec.rating) ? RecordCause::change
                                                                                  : RecordCause::interval;
    log.records.push_back(rec);
  }
  return log;
}

LoadedLog log_load_any(std::string_view data, const LegacyImportOptions& legacy_options) {
  if (is_legacy_document(data)) return {log_import_legacy(data, legacy_options), true};
  return {log_parse_unchecked(data), false};
}

}  // namespace corae
