#include "corae/service/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "corae/error.hpp"
#include "json.hpp"

namespace corae::service {

using nlohmann::json;

std::string ServiceConfig::effective_base_url() const {
  if (!base_url.empty()) {
    return base_url.back() == '/' ? base_url.substr(0, base_url.size() - 1) : base_url;
  }
  const std::string host = listen_address == "0.0.0.0" ? "localhost" : listen_address;
  return "http://" + host + ":" + std::to_string(port);
}

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw ConfigError("port out of range");
  if (data_dir.empty()) throw ConfigError("data_dir must be set");
  default_scale.validate();
  default_policy.validate();
  if (!(max_media_seconds > 0.0)) throw ConfigError("max_media_seconds must be positive");
}

ServiceConfig parse_service_config(std::string_view json_text) {
  ServiceConfig cfg;
  try {
    const auto doc = json::parse(json_text.begin(), json_text.end());
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    cfg.listen_address = doc.value("listen", cfg.listen_address);
    cfg.port = doc.value("port", cfg.port);
    cfg.data_dir = doc.value("data_dir", cfg.data_dir.string());
    cfg.base_url = doc.value("base_url", cfg.base_url);
    cfg.static_dir = doc.value("static_dir", cfg.static_dir.string());
    cfg.max_media_seconds = doc.value("max_media_seconds", cfg.max_media_seconds);
    if (auto it = doc.find("scale"); it != doc.end()) {
      cfg.default_scale.min = it->value("min", cfg.default_scale.min);
      cfg.default_scale.max = it->value("max", cfg.default_scale.max);
    }
    if (auto it = doc.find("policy"); it != doc.end()) {
      cfg.default_policy.interval_seconds = it->value("interval_seconds", cfg.default_policy.interval_seconds);
      cfg.default_policy.log_on_change = it->value("log_on_change", cfg.default_policy.log_on_change);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return cfg;
}

ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file) {
  ServiceConfig cfg;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("cannot read config file " + file->string());
    std::ostringstream text;
    text << in.rdbuf();
    cfg = parse_service_config(text.str());
  }
  if (const char* v = std::getenv("CORAE_LISTEN")) cfg.listen_address = v;
  if (const char* v = std::getenv("CORAE_PORT")) {
    try {
      cfg.port = std::stoi(v);
    } catch (const std::exception&) {
      throw ConfigError(std::string("CORAE_PORT is not a number: ") + v);
    }
  }
  if (const char* v = std::getenv("CORAE_DATA_DIR")) cfg.data_dir = v;
  if (const char* v = std::getenv("CORAE_BASE_URL")) cfg.base_url = v;
  if (const char* v = std::getenv("CORAE_STATIC_DIR")) cfg.static_dir = v;
  cfg.validate();
  return cfg;
}

}  // namespace corae::service
