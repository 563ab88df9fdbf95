#include "corae/service/session_service.hpp"

#include <algorithm>
#include <fstream>

#include "corae/log_format.hpp"
#include "corae/report.hpp"
#include "corae/service/token.hpp"

namespace corae::service {

using Code = ServiceError::Code;

SessionService::SessionService(ServiceConfig config, std::unique_ptr<SessionStore> store)
    : config_(std::move(config)), store_(std::move(store)) {
  config_.validate();
  load_existing();
}

SessionService::~SessionService() = default;

AnnotationLog SessionService::empty_log(const Session& session, const std::string& participant_id) const {
  AnnotationLog log;
  log.session_id = session.manifest.session_id;
  log.participant_id = participant_id;
  log.frame_rate = session.manifest.media.frame_rate;
  log.scale = session.manifest.scale;
  log.interval_seconds = session.manifest.policy.interval_seconds;
  return log;
}

void SessionService::load_existing() {
  for (const auto& id : store_->list_sessions()) {
    auto session = std::make_unique<Session>();
    session->manifest = store_->read_manifest(id);
    for (std::size_t i = 0; i < session->manifest.slots.size(); ++i) {
      const auto& m = session->manifest.slots[i];
      auto slot = std::make_unique<Slot>();
      slot->token = m.token;
      slot->participant_id = m.participant_id;
      slot->completed = m.completed;
      if (m.completed) {
        auto bytes = store_->read_log_file(id, m.token);
        if (!bytes) throw Error("session " + id + ": completed slot has no log file");
        slot->log = log_parse(*bytes);
        slot->sealed_bytes = std::move(*bytes);
      } else if (m.registered()) {
        slot->log = empty_log(*session, m.participant_id);
        for (auto& batch : store_->read_batches(id, m.token, session->manifest.media.frame_rate)) {
          slot->log->records.insert(slot->log->records.end(), batch.begin(), batch.end());
        }
      }
      tokens_[m.token] = {session.get(), i};
      session->slots.push_back(std::move(slot));
    }
    sessions_[id] = std::move(session);
  }
}

CreatedSession SessionService::create_session(const CreateSessionRequest& request) {
  if (request.participants < 1) throw ServiceError(Code::bad_request, "at least one participant is required");
  const double cap = request.max_media_seconds.value_or(config_.max_media_seconds);
  if (!(cap > 0.0)) throw ServiceError(Code::bad_request, "max_media_seconds must be positive");
  if (!(request.media.duration_seconds > 0.0)) throw ServiceError(Code::bad_request, "media duration must be positive");
  if (request.media.duration_seconds > cap + 1e-9) {
    throw ServiceError(Code::bad_request, "media is longer than the session limit of " + format_number(cap) + " s");
  }
  if (!std::ifstream(request.media.path, std::ios::binary)) {
    throw ServiceError(Code::bad_request, "media file is not readable: " + request.media.path);
  }

  SessionManifest manifest;
  manifest.media = request.media;
  manifest.scale = request.scale.value_or(config_.default_scale);
  manifest.policy = request.policy.value_or(config_.default_policy);
  manifest.max_media_seconds = cap;
  try {
    manifest.scale.validate();
    manifest.policy.validate();
  } catch (const ConfigError& e) {
    throw ServiceError(Code::bad_request, e.what());
  }

  std::unique_lock lock(index_mutex_);
  do {
    manifest.session_id = generate_token(12);
  } while (sessions_.count(manifest.session_id) || store_->exists(manifest.session_id));

  CreatedSession created;
  created.session_id = manifest.session_id;
  for (std::size_t i = 0; i < request.participants; ++i) {
    std::string token;
    do {
      token = generate_token();
    } while (tokens_.count(token) ||
             std::any_of(created.tokens.begin(), created.tokens.end(), [&](const auto& t) { return t == token; }));
    manifest.slots.push_back({token, "", false});
    created.tokens.push_back(token);
    created.urls.push_back(config_.effective_base_url() + "/a/" + token);
  }
  store_->write_manifest(manifest);

  auto session = std::make_unique<Session>();
  session->manifest = manifest;
  for (std::size_t i = 0; i < manifest.slots.size(); ++i) {
    auto slot = std::make_unique<Slot>();
    slot->token = manifest.slots[i].token;
    tokens_[slot->token] = {session.get(), i};
    session->slots.push_back(std::move(slot));
  }
  sessions_[manifest.session_id] = std::move(session);
  return created;
}

SessionService::SlotRef SessionService::find_slot(const std::string& token) const {
  std::shared_lock lock(index_mutex_);
  auto it = tokens_.find(token);
  if (it == tokens_.end()) throw ServiceError(Code::unauthorized, "unknown participant token");
  auto* session = it->second.first;
  return {session, session->slots[it->second.second].get(), it->second.second};
}

SessionService::Session* SessionService::find_session(const std::string& session_id) const {
  std::shared_lock lock(index_mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ServiceError(Code::not_found, "no such session");
  return it->second.get();
}

void SessionService::persist_manifest(Session& session) { store_->write_manifest(session.manifest); }

AnnotatorView SessionService::view_of(const Session& session, const Slot& slot) const {
  AnnotatorView view;
  view.participant_id = slot.participant_id;
  view.registered = !slot.participant_id.empty();
  view.completed = slot.completed;
  if (slot.log) {
    view.records = slot.log->records.size();
    if (!slot.log->records.empty()) view.last_record = slot.log->records.back();
  }
  std::lock_guard session_lock(session.mutex);
  view.session_id = session.manifest.session_id;
  view.session_state = session.manifest.state;
  view.media = session.manifest.media;
  view.scale = session.manifest.scale;
  view.policy = session.manifest.policy;
  return view;
}

AnnotatorView SessionService::annotator(const std::string& token) const {
  auto ref = find_slot(token);
  std::lock_guard slot_lock(ref.slot->mutex);
  return view_of(*ref.session, *ref.slot);
}

AnnotatorView SessionService::register_identifier(const std::string& token, const std::string& participant_id) {
  if (participant_id.empty()) throw ServiceError(Code::bad_request, "participant identifier must not be empty");
  auto ref = find_slot(token);
  std::lock_guard slot_lock(ref.slot->mutex);
  auto& slot = *ref.slot;
  if (slot.completed) throw ServiceError(Code::conflict, "annotation already completed");
  if (!slot.participant_id.empty()) {
    if (slot.participant_id != participant_id) {
      throw ServiceError(Code::conflict, "a different identifier is already registered for this link");
    }
    return view_of(*ref.session, slot);
  }
  {
    std::lock_guard session_lock(ref.session->mutex);
    auto& manifest = ref.session->manifest;
    manifest.slots[ref.index].participant_id = participant_id;
    if (manifest.state == SessionState::created) manifest.state = SessionState::annotating;
    persist_manifest(*ref.session);
    slot.participant_id = participant_id;
    slot.log = empty_log(*ref.session, participant_id);
  }
  return view_of(*ref.session, slot);
}

namespace {

// Index of a stored record with the same (timecode, cause) key, if any.
std::optional<AnnotationRecord> stored_with_key(const std::vector<AnnotationRecord>& recs,
                                                const AnnotationRecord& probe) {
  auto [lo, hi] = std::equal_range(recs.begin(), recs.end(), probe,
                                   [](const auto& x, const auto& y) { return x.timecode < y.timecode; });
  for (auto it = lo; it != hi; ++it) {
    if (it->cause == probe.cause && it->rating == probe.rating) return *it;
  }
  return std::nullopt;
}

}  // namespace

AppendAck SessionService::append_annotations(const std::string& token, std::span<const AnnotationRecord> batch) {
  auto ref = find_slot(token);
  std::lock_guard slot_lock(ref.slot->mutex);
  auto& slot = *ref.slot;
  if (slot.completed) throw ServiceError(Code::conflict, "annotation already completed");
  if (!slot.log) throw ServiceError(Code::precondition, "participant identifier must be registered first");
  {
    std::lock_guard session_lock(ref.session->mutex);
    if (ref.session->manifest.state == SessionState::sealed) throw ServiceError(Code::conflict, "session is sealed");
  }

  auto& stored = slot.log->records;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].timecode.frame_rate() != slot.log->frame_rate) {
      throw ServiceError(Code::invalid, "record frame rate differs from the session media", i);
    }
  }

  std::size_t skip = 0;
  while (skip < batch.size() && !stored.empty() && !(stored.back().timecode < batch[skip].timecode) &&
         stored_with_key(stored, batch[skip])) {
    ++skip;
  }
  const auto fresh = batch.subspan(skip);

  AppendAck ack;
  ack.duplicates = skip;
  if (!fresh.empty()) {
    if (!stored.empty() && fresh.front().timecode < stored.back().timecode) {
      throw ServiceError(Code::stale,
                         "batch starts at " + fresh.front().timecode.to_string() + ", before the last stored record " +
                             stored.back().timecode.to_string(),
                         skip);
    }
    AnnotationLog candidate = *slot.log;
    const std::size_t base = candidate.records.size();
    candidate.records.insert(candidate.records.end(), fresh.begin(), fresh.end());
    const auto violations = validate_log(candidate);
    if (!violations.empty()) {
      const auto& v = violations.front();
      const std::size_t index = v.record_index >= base ? v.record_index - base + skip : skip;
      throw ServiceError(Code::invalid,
                         std::string(to_string(v.kind)) + " at batch record " + std::to_string(index), index);
    }
    store_->append_batch(ref.session->manifest.session_id, slot.token, fresh);
    *slot.log = std::move(candidate);
    ack.accepted = fresh.size();
  }
  ack.total_records = stored.size();
  if (!stored.empty()) ack.last_timecode = stored.back().timecode;
  return ack;
}

std::string SessionService::complete_annotation(const std::string& token) {
  auto ref = find_slot(token);
  std::lock_guard slot_lock(ref.slot->mutex);
  auto& slot = *ref.slot;
  if (slot.completed) return slot.sealed_bytes;
  if (!slot.log || slot.log->records.empty()) {
    throw ServiceError(Code::precondition, "cannot complete an empty log: the initial record is mandatory");
  }
  try {
    require_valid(*slot.log);
  } catch (const LogError& e) {
    throw ServiceError(Code::invalid, e.what(), e.record_index());
  }
  auto bytes = log_serialize(*slot.log);
  const auto& session_id = ref.session->manifest.session_id;
  store_->write_log_file(session_id, slot.token, bytes);
  {
    std::lock_guard session_lock(ref.session->mutex);
    auto& manifest = ref.session->manifest;
    manifest.slots[ref.index].completed = true;
    if (std::all_of(manifest.slots.begin(), manifest.slots.end(), [](const auto& s) { return s.completed; })) {
      manifest.state = SessionState::sealed;
    }
    persist_manifest(*ref.session);
  }
  slot.completed = true;
  slot.sealed_bytes = bytes;
  return bytes;
}

std::string SessionService::download_log(const std::string& token) const {
  auto ref = find_slot(token);
  std::lock_guard slot_lock(ref.slot->mutex);
  if (ref.slot->completed) return ref.slot->sealed_bytes;
  if (!ref.slot->log) throw ServiceError(Code::precondition, "participant identifier must be registered first");
  return log_serialize(*ref.slot->log);
}

std::string SessionService::upload_log(const std::string& session_id, std::string_view data,
                                       const std::optional<std::string>& participant_id) {
  auto* session = find_session(session_id);
  LegacyImportOptions legacy;
  {
    std::lock_guard lock(session->mutex);
    if (session->manifest.state == SessionState::sealed) throw ServiceError(Code::conflict, "session is sealed");
    legacy.frame_rate = session->manifest.media.frame_rate;
    legacy.scale = session->manifest.scale;
    legacy.interval_seconds = session->manifest.policy.interval_seconds;
    legacy.session_id = session_id;
    legacy.participant_id = participant_id.value_or("");
  }

  AnnotationLog log;
  try {
    log = log_load_any(data, legacy).log;
    require_valid(log);
  } catch (const LogError& e) {
    throw ServiceError(Code::invalid, e.what(), e.record_index());
  } catch (const Error& e) {
    throw ServiceError(Code::invalid, e.what());
  }
  if (log.frame_rate != legacy.frame_rate) throw ServiceError(Code::invalid, "log frame rate differs from the session media");
  if (log.scale.min != legacy.scale.min || log.scale.max != legacy.scale.max) {
    throw ServiceError(Code::invalid, "log rating scale differs from the session scale");
  }
  if (!log.session_id.empty() && log.session_id != session_id) {
    throw ServiceError(Code::invalid, "log belongs to a different session");
  }
  const std::string pid = participant_id.value_or(log.participant_id);
  if (pid.empty()) throw ServiceError(Code::bad_request, "participant identifier is required for uploads");
  log.session_id = session_id;
  log.participant_id = pid;

  // Pick the slot: same participant first, otherwise the first unused one.
  Slot* target = nullptr;
  std::size_t target_index = 0;
  for (int pass = 0; pass < 2 && !target; ++pass) {
    for (std::size_t i = 0; i < session->slots.size(); ++i) {
      auto& slot = *session->slots[i];
      std::lock_guard slot_lock(slot.mutex);
      const bool match = pass == 0 ? slot.participant_id == pid
                                   : slot.participant_id.empty() && !slot.completed;
      if (match) {
        target = &slot;
        target_index = i;
        break;
      }
    }
  }
  if (!target) throw ServiceError(Code::conflict, "no free participant slot for this upload");

  std::lock_guard slot_lock(target->mutex);
  if (target->completed) throw ServiceError(Code::conflict, "annotation already completed for " + pid);
  if (!target->participant_id.empty() && target->participant_id != pid) {
    throw ServiceError(Code::conflict, "slot was claimed concurrently");
  }
  auto bytes = log_serialize(log);
  store_->write_log_file(session_id, target->token, bytes);
  {
    std::lock_guard lock(session->mutex);
    auto& manifest = session->manifest;
    if (manifest.state == SessionState::sealed) throw ServiceError(Code::conflict, "session is sealed");
    manifest.slots[target_index].participant_id = pid;
    manifest.slots[target_index].completed = true;
    manifest.state = std::all_of(manifest.slots.begin(), manifest.slots.end(), [](const auto& s) { return s.completed; })
                         ? SessionState::sealed
                         : SessionState::annotating;
    persist_manifest(*session);
  }
  target->participant_id = pid;
  target->log = std::move(log);
  target->completed = true;
  target->sealed_bytes = bytes;
  return bytes;
}

std::string SessionService::get_analysis(const std::string& session_id, const DetectorConfig& cfg) {
  auto* session = find_session(session_id);
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ServiceError(Code::bad_request, e.what());
  }
  std::string key;
  for (double v : {cfg.window_seconds, cfg.slope_threshold, cfg.plateau_epsilon, cfg.sync_correlation_threshold,
                   cfg.opposition_correlation_threshold, cfg.rebound_max_lag, cfg.opposing_slope_ratio_tolerance}) {
    key += format_number(v) + ';';
  }
  {
    std::lock_guard lock(session->mutex);
    if (session->manifest.state != SessionState::sealed) {
      throw ServiceError(Code::precondition, "analysis is available once every participant has completed");
    }
    if (session->slots.size() < 2) throw ServiceError(Code::precondition, "analysis needs two annotation logs");
    if (auto it = session->analysis_cache.find(key); it != session->analysis_cache.end()) return it->second;
  }
  // Sealed logs never change, so reading them without the session lock is safe.
  AnnotationLog a, b;
  {
    std::lock_guard la(session->slots[0]->mutex);
    a = *session->slots[0]->log;
  }
  {
    std::lock_guard lb(session->slots[1]->mutex);
    b = *session->slots[1]->log;
  }
  std::string report;
  try {
    report = report_to_json(analyze_session(a, b, cfg));
  } catch (const AnalysisError& e) {
    throw ServiceError(Code::precondition, e.what());
  }
  std::lock_guard lock(session->mutex);
  return session->analysis_cache.emplace(key, std::move(report)).first->second;
}

SessionSummary SessionService::summary(const std::string& session_id) const {
  auto* session = find_session(session_id);
  SessionSummary out;
  std::vector<SlotSummary> slots;
  for (const auto& slot : session->slots) {
    std::lock_guard slot_lock(slot->mutex);
    slots.push_back({slot->participant_id, slot->completed, slot->log ? slot->log->records.size() : 0});
  }
  std::lock_guard lock(session->mutex);
  out.session_id = session->manifest.session_id;
  out.state = session->manifest.state;
  out.media = session->manifest.media;
  out.slots = std::move(slots);
  return out;
}

std::filesystem::path SessionService::media_path(const std::string& session_id) const {
  auto* session = find_session(session_id);
  std::lock_guard lock(session->mutex);
  return session->manifest.media.path;
}

std::size_t SessionService::session_count() const {
  std::shared_lock lock(index_mutex_);
  return sessions_.size();
}

}  // namespace corae::service
