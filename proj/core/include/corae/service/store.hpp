#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corae/annotation.hpp"

namespace corae::service {

struct MediaRef {
  std::string path;
  FrameRate frame_rate{};
  double duration_seconds = 0.0;

  friend bool operator==(const MediaRef&, const MediaRef&) = default;
};

enum class SessionState { created, annotating, sealed };

std::string_view to_string(SessionState state) noexcept;
SessionState parse_session_state(std::string_view text);

struct SlotManifest {
  std::string token;
  std::string participant_id;
  bool completed = false;

  bool registered() const noexcept { return !participant_id.empty(); }

  friend bool operator==(const SlotManifest&, const SlotManifest&) = default;
};

struct SessionManifest {
  std::string session_id;
  MediaRef media;
  RatingScale scale{};
  SamplingPolicy policy{};
  double max_media_seconds = 600.0;
  SessionState state = SessionState::created;
  std::vector<SlotManifest> slots;

  friend bool operator==(const SessionManifest&, const SessionManifest&) = default;
};

std::string manifest_to_json(const SessionManifest& manifest);
SessionManifest manifest_from_json(std::string_view text);

// Persistence behind the session service. Every write is durable when the
// call returns.
class SessionStore {
 public:
  virtual ~SessionStore() = default;

  virtual std::vector<std::string> list_sessions() const = 0;
  virtual bool exists(const std::string& session_id) const = 0;

  virtual void write_manifest(const SessionManifest& manifest) = 0;
  virtual SessionManifest read_manifest(const std::string& session_id) const = 0;

  // Write-ahead journal of accepted record batches for one participant slot.
  virtual void append_batch(const std::string& session_id, const std::string& token,
                            std::span<const AnnotationRecord> records) = 0;
  // Complete batches in write order. A torn trailing write is ignored.
  virtual std::vector<std::vector<AnnotationRecord>> read_batches(const std::string& session_id,
                                                                  const std::string& token,
                                                                  FrameRate rate) const = 0;

  // Finished canonical log for a slot.
  virtual void write_log_file(const std::string& session_id, const std::string& token, std::string_view bytes) = 0;
  virtual std::optional<std::string> read_log_file(const std::string& session_id, const std::string& token) const = 0;
};

// Layout under the root:
//   sessions/<id>/manifest.json
//   sessions/<id>/slots/<token>.wal    one JSON line per accepted batch
//   sessions/<id>/slots/<token>.json   canonical log once completed
class FileSessionStore final : public SessionStore {
 public:
  explicit FileSessionStore(std::filesystem::path root);

  std::vector<std::string> list_sessions() const override;
  bool exists(const std::string& session_id) const override;
  void write_manifest(const SessionManifest& manifest) override;
  SessionManifest read_manifest(const std::string& session_id) const override;
  void append_batch(const std::string& session_id, const std::string& token,
                    std::span<const AnnotationRecord> records) override;
  std::vector<std::vector<AnnotationRecord>> read_batches(const std::string& session_id, const std::string& token,
                                                          FrameRate rate) const override;
  void write_log_file(const std::string& session_id, const std::string& token, std::string_view bytes) override;
  std::optional<std::string> read_log_file(const std::string& session_id, const std::string& token) const override;

  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path session_dir(const std::string& session_id) const;

  std::filesystem::path root_;
};

}  // namespace corae::service
