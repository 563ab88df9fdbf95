#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "corae/analysis.hpp"
#include "corae/annotation.hpp"
#include "corae/error.hpp"
#include "corae/service/config.hpp"
#include "corae/service/store.hpp"

namespace corae::service {

class ServiceError : public Error {
 public:
  enum class Code {
    bad_request,
    unauthorized,  // unknown participant token
    not_found,
    conflict,      // sealed session, completed slot, identity already set
    precondition,  // operation not allowed in the current state
    invalid,       // records break a log invariant
    stale,         // batch precedes what is already stored; resync from the ack
  };

  ServiceError(Code code, std::string message, std::optional<std::size_t> index = std::nullopt)
      : Error(std::move(message)), code_(code), index_(index) {}

  Code code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  Code code_;
  std::optional<std::size_t> index_;
};

struct CreateSessionRequest {
  MediaRef media;
  std::optional<RatingScale> scale;
  std::optional<SamplingPolicy> policy;
  std::size_t participants = 2;
  std::optional<double> max_media_seconds;
};

struct CreatedSession {
  std::string session_id;
  std::vector<std::string> tokens;
  std::vector<std::string> urls;
};

struct AppendAck {
  std::size_t accepted = 0;
  std::size_t duplicates = 0;
  std::size_t total_records = 0;
  std::optional<Timecode> last_timecode;
};

struct AnnotatorView {
  std::string session_id;
  std::string participant_id;
  bool registered = false;
  bool completed = false;
  SessionState session_state = SessionState::created;
  MediaRef media;
  RatingScale scale;
  SamplingPolicy policy;
  std::size_t records = 0;
  std::optional<AnnotationRecord> last_record;
};

struct SlotSummary {
  std::string participant_id;
  bool completed = false;
  std::size_t records = 0;
};

struct SessionSummary {
  std::string session_id;
  SessionState state = SessionState::created;
  MediaRef media;
  std::vector<SlotSummary> slots;
};

// Session lifecycle and annotation ingestion. Thread-safe: appends to one slot
// are serialized, different slots and sessions proceed independently.
class SessionService {
 public:
  SessionService(ServiceConfig config, std::unique_ptr<SessionStore> store);
  ~SessionService();

  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  CreatedSession create_session(const CreateSessionRequest& request);

  AnnotatorView register_identifier(const std::string& token, const std::string& participant_id);
  AnnotatorView annotator(const std::string& token) const;

  // Appends atomically; a replayed prefix of already stored records is
  // skipped rather than duplicated.
  AppendAck append_annotations(const std::string& token, std::span<const AnnotationRecord> batch);

  // Seals the slot and returns its canonical log file. Repeat calls return
  // the same bytes.
  std::string complete_annotation(const std::string& token);
  // Canonical log as stored so far.
  std::string download_log(const std::string& token) const;

  // End-of-session file workflow: attach a finished log (canonical or legacy)
  // to the slot with the matching participant id, else the first empty slot.
  std::string upload_log(const std::string& session_id, std::string_view data,
                         const std::optional<std::string>& participant_id = std::nullopt);

  // Report JSON for a sealed session's first two logs. Cached per config.
  std::string get_analysis(const std::string& session_id, const DetectorConfig& cfg);

  SessionSummary summary(const std::string& session_id) const;
  std::filesystem::path media_path(const std::string& session_id) const;

  const ServiceConfig& config() const noexcept { return config_; }
  std::size_t session_count() const;

 private:
  struct Slot {
    mutable std::mutex mutex;
    std::string token;
    std::string participant_id;
    bool completed = false;
    std::optional<AnnotationLog> log;
    std::string sealed_bytes;
  };

  struct Session {
    mutable std::mutex mutex;  // guards manifest fields below; taken after a slot mutex
    SessionManifest manifest;
    std::vector<std::unique_ptr<Slot>> slots;
    std::map<std::string, std::string> analysis_cache;
  };

  struct SlotRef {
    Session* session;
    Slot* slot;
    std::size_t index;
  };

  void load_existing();
  SlotRef find_slot(const std::string& token) const;
  Session* find_session(const std::string& session_id) const;
  void persist_manifest(Session& session);  // caller holds session.mutex
  AnnotatorView view_of(const Session& session, const Slot& slot) const;
  AnnotationLog empty_log(const Session& session, const std::string& participant_id) const;

  ServiceConfig config_;
  std::unique_ptr<SessionStore> store_;
  mutable std::shared_mutex index_mutex_;
  std::unordered_map<std::string, std::unique_ptr<Session>> sessions_;
  std::unordered_map<std::string, std::pair<Session*, std::size_t>> tokens_;
};

}  // namespace corae::service
