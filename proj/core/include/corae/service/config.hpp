#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "corae/annotation.hpp"

namespace corae::service {

struct ServiceConfig {
  std::string listen_address = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "corae-data";
  // Prefix for participant URLs; derived from the listen address when empty.
  std::string base_url;
  // Optional directory with the browser dashboard's assets, served at /static.
  std::filesystem::path static_dir;
  RatingScale default_scale{};
  SamplingPolicy default_policy{};
  double max_media_seconds = 600.0;

  std::string effective_base_url() const;
  void validate() const;
};

// Reads a JSON config file (when given), then applies CORAE_* environment
// overrides: CORAE_LISTEN, CORAE_PORT, CORAE_DATA_DIR, CORAE_BASE_URL, CORAE_STATIC_DIR.
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file);

ServiceConfig parse_service_config(std::string_view json_text);

}  // namespace corae::service
