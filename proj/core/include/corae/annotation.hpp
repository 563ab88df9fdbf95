#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "corae/timeline.hpp"

namespace corae {

enum class Direction { left, right };

enum class RecordCause { interval, change };

std::string_view to_string(RecordCause cause) noexcept;
// Throws LogError on anything other than "interval" or "change".
RecordCause parse_record_cause(std::string_view text);

struct SliderState {
  Rating current{};
  bool playing = false;
  Timecode playhead{};

  friend bool operator==(const SliderState&, const SliderState&) = default;
};

enum class StepOutcome {
  moved,
  at_bound,  // accepted, but the slider was already at the end of the scale
  rejected_paused,
};

struct StepResult {
  SliderState state;
  StepOutcome outcome;

  bool accepted() const noexcept { return outcome != StepOutcome::rejected_paused; }
  bool changed() const noexcept { return outcome == StepOutcome::moved; }
};

// Moves the slider one point left or right. Only allowed while playing.
StepResult slider_step(const SliderState& state, Direction direction, const RatingScale& scale);

SliderState toggle_playback(const SliderState& state) noexcept;

struct AnnotationRecord {
  Rating rating{};
  Timecode timecode{};
  RecordCause cause = RecordCause::interval;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

struct SamplingPolicy {
  double interval_seconds = 1.0;
  bool log_on_change = true;

  void validate() const;

  friend bool operator==(const SamplingPolicy&, const SamplingPolicy&) = default;
};

struct AnnotationLog {
  static constexpr std::string_view kVersion = "1";

  std::string version{kVersion};
  std::string session_id;
  std::string participant_id;
  FrameRate frame_rate{};
  RatingScale scale{};
  double interval_seconds = 1.0;
  std::vector<AnnotationRecord> records;

  // A log holding only the neutral record at 00:00:00:00.
  static AnnotationLog start(std::string session_id, std::string participant_id, FrameRate rate = {},
                             RatingScale scale = {}, double interval_seconds = 1.0);

  const AnnotationRecord* last_interval_record() const noexcept;

  friend bool operator==(const AnnotationLog&, const AnnotationLog&) = default;
};

enum class ViolationKind {
  missing_initial_record,
  rating_out_of_scale,
  unsorted_timecode,
  continuity,
  change_without_delta,
  frame_rate_mismatch,
  bad_header,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::size_t record_index = 0;
  std::string message;
};

// Every invariant breach in the log, in record order. Empty means valid.
std::vector<Violation> validate_log(const AnnotationLog& log);
// Throws LogError carrying the first violation's record index.
void require_valid(const AnnotationLog& log);

enum class TickOutcome { appended, not_due, regression, continuity_error };

TickOutcome record_tick(AnnotationLog& log, const SliderState& state, const SamplingPolicy& policy);

enum class ChangeOutcome { appended, no_delta, continuity_error, regression };

ChangeOutcome record_change(AnnotationLog& log, const SliderState& state);

// Drives the slider state machine and both logging modes together, the way a
// dashboard does: keys and playhead updates in, a valid log out.
class Annotator {
 public:
  explicit Annotator(AnnotationLog log, SamplingPolicy policy = {});

  StepOutcome press(Direction direction);
  void toggle() noexcept { state_ = toggle_playback(state_); }
  // Advances media time; emits interval records while playing.
  TickOutcome advance_to(Timecode playhead);

  const SliderState& state() const noexcept { return state_; }
  const AnnotationLog& log() const noexcept { return log_; }
  AnnotationLog&& take_log() && noexcept { return std::move(log_); }

 private:
  AnnotationLog log_;
  SamplingPolicy policy_;
  SliderState state_;
};

}  // namespace corae
