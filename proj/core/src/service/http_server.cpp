#include "corae/service/http_server.hpp"

#include <fstream>
#include <memory>

#include "corae/log_format.hpp"
#include "corae/service/token.hpp"
#include "httplib.h"
#include "json.hpp"

namespace corae::service {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

int status_for(ServiceError::Code code) {
  switch (code) {
    case ServiceError::Code::bad_request: return 400;
    case ServiceError::Code::unauthorized: return 403;
    case ServiceError::Code::not_found: return 404;
    case ServiceError::Code::conflict: return 409;
    case ServiceError::Code::stale: return 409;
    case ServiceError::Code::precondition: return 412;
    case ServiceError::Code::invalid: return 422;
  }
  return 500;
}

std::string_view code_name(ServiceError::Code code) {
  switch (code) {
    case ServiceError::Code::bad_request: return "bad_request";
    case ServiceError::Code::unauthorized: return "unauthorized";
    case ServiceError::Code::not_found: return "not_found";
    case ServiceError::Code::conflict: return "conflict";
    case ServiceError::Code::stale: return "stale";
    case ServiceError::Code::precondition: return "precondition";
    case ServiceError::Code::invalid: return "invalid";
  }
  return "error";
}

void send_json(httplib::Response& res, const ordered_json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                std::optional<std::size_t> index = std::nullopt) {
  ordered_json body{{"error", message}, {"code", code}};
  if (index) body["index"] = *index;
  send_json(res, body, status);
}

ordered_json scale_json(const RatingScale& s) {
  return {{"min", s.min},
          {"max", s.max},
          {"labels", {{"min", s.min_label}, {"neutral", s.neutral_label}, {"max", s.max_label}}}};
}

ordered_json record_json(const AnnotationRecord& r) {
  return {{"rating", r.rating.value}, {"timecode", r.timecode.to_string()}, {"cause", to_string(r.cause)}};
}

ordered_json view_json(const AnnotatorView& v) {
  ordered_json out{{"participant_id", v.participant_id},
                   {"registered", v.registered},
                   {"completed", v.completed},
                   {"session_state", to_string(v.session_state)},
                   {"media_url", "/media/" + v.session_id},
                   {"frame_rate", v.media.frame_rate.fps()},
                   {"duration_seconds", v.media.duration_seconds},
                   {"scale", scale_json(v.scale)},
                   {"interval_seconds", v.policy.interval_seconds},
                   {"log_on_change", v.policy.log_on_change},
                   {"records", v.records}};
  out["last_record"] = v.last_record ? record_json(*v.last_record) : ordered_json(nullptr);
  return out;
}

std::vector<AnnotationRecord> parse_batch(const std::string& body, FrameRate rate) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ServiceError(ServiceError::Code::bad_request, std::string("malformed JSON: ") + e.what());
  }
  const json* list = &doc;
  if (doc.is_object()) {
    auto it = doc.find("annotations");
    if (it == doc.end()) throw ServiceError(ServiceError::Code::bad_request, "missing 'annotations' array");
    list = &*it;
  }
  if (!list->is_array()) throw ServiceError(ServiceError::Code::bad_request, "'annotations' must be an array");
  std::vector<AnnotationRecord> out;
  out.reserve(list->size());
  for (std::size_t i = 0; i < list->size(); ++i) {
    const auto& r = (*list)[i];
    try {
      out.push_back({Rating{r.at("rating").get<int>()}, Timecode::parse(r.at("timecode").get<std::string>(), rate),
                     parse_record_cause(r.at("cause").get<std::string>())});
    } catch (const std::exception& e) {
      throw ServiceError(ServiceError::Code::bad_request, std::string("bad record: ") + e.what(), i);
    }
  }
  return out;
}

std::string html_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string dashboard_page(const std::string& token, const AnnotatorView& view) {
  ordered_json boot = view_json(view);
  boot["token"] = token;
  // Keep "</script>" out of the embedded JSON.
  std::string boot_text = boot.dump();
  for (std::size_t pos = 0; (pos = boot_text.find("</", pos)) != std::string::npos; pos += 3) {
    boot_text.replace(pos, 2, "<\\/");
  }

  std::string ticks;
  for (int v = view.scale.min; v <= view.scale.max; ++v) ticks += "<li>" + std::to_string(v) + "</li>";

  std::string html = R"(<!doctype html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>Annotation</title>
<style>
body { font-family: sans-serif; max-width: 960px; margin: 0 auto; text-align: center; }
#progress { height: 4px; background: #ddd; } #progress > div { height: 100%; width: 0; background: #888; }
#slider { display: flex; justify-content: space-between; list-style: none; padding: 0;
          background: linear-gradient(to right, #d33, #ddd, #3a3); }
</style>
</head>
<body>
<p id="instructions">Use the <b>Spacebar</b> to toggle playback and the <b>Left and Right Arrows</b> to control the slider.
Rate how the other person came across, from )" +
                     html_escape(view.scale.min_label) + " to " + html_escape(view.scale.max_label) + R"(.</p>
<video id="video" src="/media/)" + html_escape(view.session_id) + R"(" preload="auto"></video>
<div id="progress"><div></div></div>
<ul id="slider">)" + ticks + R"(</ul>
<script id="corae-session" type="application/json">)" + boot_text + R"(</script>
<script src="/static/dashboard.js"></script>
</body>
</html>
)";
  return html;
}

std::string media_type(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".mp4" || ext == ".m4v") return "video/mp4";
  if (ext == ".webm") return "video/webm";
  if (ext == ".ogv" || ext == ".ogg") return "video/ogg";
  if (ext == ".mov") return "video/quicktime";
  return "application/octet-stream";
}

double query_double(const httplib::Request& req, const char* key, double fallback) {
  if (!req.has_param(key)) return fallback;
  const auto text = req.get_param_value(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ServiceError(ServiceError::Code::bad_request, std::string("query parameter '") + key + "' is not a number");
  }
}

}  // namespace

struct HttpServer::Impl {
  explicit Impl(SessionService& s) : service(s) {}

  template <typename Fn>
  auto guarded(Fn fn) {
    return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const ServiceError& e) {
        send_error(res, status_for(e.code()), code_name(e.code()), e.what(), e.index());
      } catch (const ConfigError& e) {
        send_error(res, 400, "bad_request", e.what());
      } catch (const json::exception& e) {
        send_error(res, 400, "bad_request", e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
      }
    };
  }

  void routes();

  SessionService& service;
  httplib::Server server;
};

void HttpServer::Impl::routes() {
  server.Post("/api/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    CreateSessionRequest request;
    const auto& media = body.at("media");
    request.media.path = media.at("path").get<std::string>();
    request.media.frame_rate = FrameRate(media.value("frame_rate", FrameRate::kDefault));
    request.media.duration_seconds = media.at("duration_seconds").get<double>();
    request.participants = body.value("participants", std::size_t{2});
    if (auto it = body.find("scale"); it != body.end()) {
      RatingScale scale = service.config().default_scale;
      scale.min = it->value("min", scale.min);
      scale.max = it->value("max", scale.max);
      request.scale = scale;
    }
    if (auto it = body.find("policy"); it != body.end()) {
      SamplingPolicy policy = service.config().default_policy;
      policy.interval_seconds = it->value("interval_seconds", policy.interval_seconds);
      policy.log_on_change = it->value("log_on_change", policy.log_on_change);
      request.policy = policy;
    }
    if (auto it = body.find("max_media_seconds"); it != body.end()) request.max_media_seconds = it->get<double>();

    const auto created = service.create_session(request);
    ordered_json out{{"session_id", created.session_id}};
    auto participants = ordered_json::array();
    for (std::size_t i = 0; i < created.tokens.size(); ++i) {
      participants.push_back({{"token", created.tokens[i]}, {"url", created.urls[i]}});
    }
    out["participants"] = std::move(participants);
    send_json(res, out, 201);
  }));

  server.Get("/api/sessions/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto s = service.summary(req.path_params.at("id"));
    ordered_json out{{"session_id", s.session_id},
                     {"state", to_string(s.state)},
                     {"frame_rate", s.media.frame_rate.fps()},
                     {"duration_seconds", s.media.duration_seconds}};
    auto slots = ordered_json::array();
    for (const auto& slot : s.slots) {
      slots.push_back({{"participant_id", slot.participant_id}, {"completed", slot.completed}, {"records", slot.records}});
    }
    out["participants"] = std::move(slots);
    send_json(res, out);
  }));

  server.Post("/api/sessions/:id/upload", guarded([this](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> pid;
    if (req.has_param("participant")) pid = req.get_param_value("participant");
    const auto bytes = service.upload_log(req.path_params.at("id"), req.body, pid);
    res.set_content(bytes, "application/json");
  }));

  server.Get("/api/sessions/:id/analysis", guarded([this](const httplib::Request& req, httplib::Response& res) {
    DetectorConfig cfg;
    cfg.window_seconds = query_double(req, "window", cfg.window_seconds);
    cfg.slope_threshold = query_double(req, "slope", cfg.slope_threshold);
    cfg.plateau_epsilon = query_double(req, "plateau_eps", cfg.plateau_epsilon);
    cfg.sync_correlation_threshold = query_double(req, "sync", cfg.sync_correlation_threshold);
    cfg.opposition_correlation_threshold = query_double(req, "opposition", -cfg.sync_correlation_threshold);
    cfg.rebound_max_lag = query_double(req, "lag", cfg.rebound_max_lag);
    cfg.opposing_slope_ratio_tolerance = query_double(req, "ratio", cfg.opposing_slope_ratio_tolerance);
    res.set_content(service.get_analysis(req.path_params.at("id"), cfg), "application/json");
  }));

  server.Get("/a/:token", [this](const httplib::Request& req, httplib::Response& res) {
    const auto& token = req.path_params.at("token");
    try {
      if (!is_token_shaped(token)) throw ServiceError(ServiceError::Code::unauthorized, "bad token");
      res.set_content(dashboard_page(token, service.annotator(token)), "text/html; charset=utf-8");
    } catch (const ServiceError&) {
      res.status = 403;
      res.set_content("<!doctype html><title>Access denied</title><p>This annotation link is not valid.</p>\n",
                      "text/html; charset=utf-8");
    }
  });

  server.Get("/api/annotator/:token", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, view_json(service.annotator(req.path_params.at("token"))));
  }));

  server.Post("/api/annotator/:token/identity", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    const auto pid = body.at("participant_id").get<std::string>();
    send_json(res, view_json(service.register_identifier(req.path_params.at("token"), pid)));
  }));

  server.Post("/api/annotator/:token/annotations", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto& token = req.path_params.at("token");
    const auto view = service.annotator(token);
    const auto batch = parse_batch(req.body, view.media.frame_rate);
    try {
      const auto ack = service.append_annotations(token, batch);
      ordered_json out{{"accepted", ack.accepted}, {"duplicates", ack.duplicates}, {"records", ack.total_records}};
      out["last_timecode"] = ack.last_timecode ? ordered_json(ack.last_timecode->to_string()) : ordered_json(nullptr);
      send_json(res, out);
    } catch (const ServiceError& e) {
      ordered_json body{{"error", e.what()}, {"code", code_name(e.code())}};
      if (e.index()) body["index"] = *e.index();
      const auto now = service.annotator(token);
      body["last_timecode"] = now.last_record ? ordered_json(now.last_record->timecode.to_string()) : ordered_json(nullptr);
      send_json(res, body, status_for(e.code()));
    }
  }));

  server.Post("/api/annotator/:token/complete", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto bytes = service.complete_annotation(req.path_params.at("token"));
    res.set_header("Content-Disposition", "attachment; filename=\"annotations.json\"");
    res.set_content(bytes, "application/json");
  }));

  server.Get("/api/annotator/:token/log", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto bytes = service.download_log(req.path_params.at("token"));
    res.set_header("Content-Disposition", "attachment; filename=\"annotations.json\"");
    res.set_content(bytes, "application/json");
  }));

  server.Get("/media/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto path = service.media_path(req.path_params.at("id"));
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) throw ServiceError(ServiceError::Code::not_found, "media file is missing");
    auto file = std::make_shared<std::ifstream>(path, std::ios::binary);
    if (!*file) throw ServiceError(ServiceError::Code::not_found, "media file is not readable");
    res.set_header("Accept-Ranges", "bytes");
    res.set_content_provider(static_cast<std::size_t>(size), media_type(path),
                             [file](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
                               char buf[64 * 1024];
                               file->clear();
                               file->seekg(static_cast<std::streamoff>(offset));
                               while (length > 0) {
                                 const auto chunk = std::min(length, sizeof buf);
                                 file->read(buf, static_cast<std::streamsize>(chunk));
                                 const auto got = static_cast<std::size_t>(file->gcount());
                                 if (got == 0 || !sink.write(buf, got)) return false;
                                 length -= got;
                               }
                               return true;
                             });
  }));

  if (!service.config().static_dir.empty()) {
    server.set_mount_point("/static", service.config().static_dir.string());
  }
}

HttpServer::HttpServer(SessionService& service) : impl_(std::make_unique<Impl>(service)) { impl_->routes(); }

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace corae::service
