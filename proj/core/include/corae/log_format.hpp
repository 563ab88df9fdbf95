#pragma once

#include <string>
#include <string_view>

#include "corae/annotation.hpp"

namespace corae {

// Canonical UTF-8 JSON document for a log. Byte-for-byte deterministic.
std::string log_serialize(const AnnotationLog& log);

// Parses the canonical document and checks every log invariant.
// Throws LogError (with the record index where one applies).
AnnotationLog log_parse(std::string_view data);

// Reads the header and records without checking invariants; used by tools
// that want to list every violation instead of stopping at the first.
AnnotationLog log_parse_unchecked(std::string_view data);

struct LegacyImportOptions {
  FrameRate frame_rate{};
  RatingScale scale{};
  double interval_seconds = 1.0;
  std::string session_id;
  std::string participant_id;
};

// Imports the older array-of-pairs form `[{"<rating>": "HH:MM:SS:FF"}, ...]`.
// Causes are inferred: change when the rating moved, interval otherwise.
AnnotationLog log_import_legacy(std::string_view data, const LegacyImportOptions& options = {});

bool is_legacy_document(std::string_view data);

struct LoadedLog {
  AnnotationLog log;
  bool legacy = false;
};

// Accepts either format. Invariants are not checked.
LoadedLog log_load_any(std::string_view data, const LegacyImportOptions& legacy_options = {});

}  // namespace corae
