#include "corae/annotation.hpp"

#include <cmath>
#include <cstdlib>

#include "corae/error.hpp"

namespace corae {

std::string_view to_string(RecordCause cause) noexcept {
  return cause == RecordCause::interval ? "interval" : "change";
}

RecordCause parse_record_cause(std::string_view text) {
  if (text == "interval") return RecordCause::interval;
  if (text == "change") return RecordCause::change;
  throw LogError("unknown record cause '" + std::string(text) + "'");
}

StepResult slider_step(const SliderState& state, Direction direction, const RatingScale& scale) {
  if (!state.playing) return {state, StepOutcome::rejected_paused};
  const int delta = direction == Direction::right ? 1 : -1;
  SliderState next = state;
  next.current = rating_clamp(state.current.value + delta, scale);
  return {next, next.current == state.current ? StepOutcome::at_bound : StepOutcome::moved};
}

SliderState toggle_playback(const SliderState& state) noexcept {
  SliderState next = state;
  next.playing = !state.playing;
  return next;
}

void SamplingPolicy::validate() const {
  if (!(interval_seconds > 0.0) || !std::isfinite(interval_seconds)) {
    throw ConfigError("sampling interval must be a positive number of seconds");
  }
}

AnnotationLog AnnotationLog::start(std::string session_id, std::string participant_id, FrameRate rate,
                                   RatingScale scale, double interval_seconds) {
  AnnotationLog log;
  log.session_id = std::move(session_id);
  log.participant_id = std::move(participant_id);
  log.frame_rate = rate;
  log.scale = std::move(scale);
  log.interval_seconds = interval_seconds;
  log.records.push_back({Rating{0}, Timecode::from_frames(0, rate), RecordCause::interval});
  return log;
}

const AnnotationRecord* AnnotationLog::last_interval_record() const noexcept {
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    if (it->cause == RecordCause::interval) return &*it;
  }
  return nullptr;
}

std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::missing_initial_record: return "missing initial record";
    case ViolationKind::rating_out_of_scale: return "rating out of scale";
    case ViolationKind::unsorted_timecode: return "unsorted timecode";
    case ViolationKind::continuity: return "continuity violation";
    case ViolationKind::change_without_delta: return "change record without rating change";
    case ViolationKind::frame_rate_mismatch: return "frame rate mismatch";
    case ViolationKind::bad_header: return "bad header";
  }
  return "unknown";
}

std::vector<Violation> validate_log(const AnnotationLog& log) {
  std::vector<Violation> out;
  auto add = [&](ViolationKind kind, std::size_t index, std::string detail) {
    std::string msg{to_string(kind)};
    msg += " at record " + std::to_string(index);
    if (!detail.empty()) msg += ": " + detail;
    out.push_back({kind, index, std::move(msg)});
  };

  if (log.version != AnnotationLog::kVersion) {
    out.push_back({ViolationKind::bad_header, 0, "unsupported log version '" + log.version + "'"});
  }
  if (!(log.scale.min < 0 && 0 < log.scale.max)) {
    out.push_back({ViolationKind::bad_header, 0, "rating scale requires min < 0 < max"});
  }
  if (!(log.interval_seconds > 0.0) || !std::isfinite(log.interval_seconds)) {
    out.push_back({ViolationKind::bad_header, 0, "interval_seconds must be positive"});
  }

  const auto& recs = log.records;
  if (recs.empty()) {
    add(ViolationKind::missing_initial_record, 0, "log has no records");
    return out;
  }
  if (recs.front().timecode.total_frames() != 0) {
    add(ViolationKind::missing_initial_record, 0,
        "first record is at " + recs.front().timecode.to_string() + ", expected 00:00:00:00");
  }
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    if (r.timecode.frame_rate() != log.frame_rate) {
      add(ViolationKind::frame_rate_mismatch, i, "");
    }
    if (!log.scale.contains(r.rating.value)) {
      add(ViolationKind::rating_out_of_scale, i,
          "rating " + std::to_string(r.rating.value) + " outside [" + std::to_string(log.scale.min) +
              ", " + std::to_string(log.scale.max) + "]");
    }
    if (i == 0) {
      if (r.cause == RecordCause::change) add(ViolationKind::change_without_delta, i, "");
      continue;
    }
    const auto& prev = recs[i - 1];
    if (r.timecode < prev.timecode) {
      add(ViolationKind::unsorted_timecode, i,
          r.timecode.to_string() + " precedes " + prev.timecode.to_string());
    }
    const int delta = r.rating.value - prev.rating.value;
    if (std::abs(delta) > 1) {
      add(ViolationKind::continuity, i,
          "rating jumps " + std::to_string(prev.rating.value) + " -> " + std::to_string(r.rating.value));
    } else if (r.cause == RecordCause::change && delta == 0) {
      add(ViolationKind::change_without_delta, i, "");
    }
  }
  return out;
}

void require_valid(const AnnotationLog& log) {
  auto violations = validate_log(log);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw LogError(v.message, v.record_index);
  }
}

TickOutcome record_tick(AnnotationLog& log, const SliderState& state, const SamplingPolicy& policy) {
  if (!log.records.empty() && state.playhead < log.records.back().timecode) {
    return TickOutcome::regression;
  }
  if (const auto* last = log.last_interval_record()) {
    const double elapsed = state.playhead.total_seconds() - last->timecode.total_seconds();
    if (elapsed + 1e-9 < policy.interval_seconds) return TickOutcome::not_due;
  }
  if (!log.records.empty() && std::abs(state.current.value - log.records.back().rating.value) > 1) {
    return TickOutcome::continuity_error;
  }
  log.records.push_back({state.current, state.playhead, RecordCause::interval});
  return TickOutcome::appended;
}

ChangeOutcome record_change(AnnotationLog& log, const SliderState& state) {
  if (log.records.empty()) return ChangeOutcome::continuity_error;
  const auto& last = log.records.back();
  const int delta = state.current.value - last.rating.value;
  if (delta == 0) return ChangeOutcome::no_delta;
  if (std::abs(delta) != 1) return ChangeOutcome::continuity_error;
  if (state.playhead < last.timecode) return ChangeOutcome::regression;
  log.records.push_back({state.current, state.playhead, RecordCause::change});
  return ChangeOutcome::appended;
}

Annotator::Annotator(AnnotationLog log, SamplingPolicy policy)
    : log_(std::move(log)), policy_(policy) {
  policy_.validate();
  require_valid(log_);
  state_.current = log_.records.back().rating;
  state_.playhead = log_.records.back().timecode;
}

StepOutcome Annotator::press(Direction direction) {
  auto step = slider_step(state_, direction, log_.scale);
  if (!step.changed()) return step.outcome;
  state_ = step.state;
  if (policy_.log_on_change) {
    // After a backward seek the log stays monotone: the change is stamped at
    // the furthest logged position.
    SliderState stamped = state_;
    if (stamped.playhead < log_.records.back().timecode) stamped.playhead = log_.records.back().timecode;
    record_change(log_, stamped);
  }
  return step.outcome;
}

TickOutcome Annotator::advance_to(Timecode playhead) {
  state_.playhead = playhead.frame_rate() == log_.frame_rate
                        ? playhead
                        : Timecode::from_seconds(playhead.total_seconds(), log_.frame_rate);
  if (!state_.playing) return TickOutcome::not_due;
  return record_tick(log_, state_, policy_);
}

}  // namespace corae
