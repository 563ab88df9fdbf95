#include "corae/timeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "corae/error.hpp"

namespace corae {

FrameRate::FrameRate(int frames_per_second) : fps_(frames_per_second) {
  if (frames_per_second < 1) {
    throw TimecodeError("frame rate must be >= 1, got " + std::to_string(frames_per_second));
  }
}

Timecode::Timecode(std::int64_t hours, int minutes, int seconds, int frame, FrameRate rate)
    : rate_(rate) {
  if (hours < 0) throw TimecodeError("negative hours");
  if (minutes < 0 || minutes > 59) throw TimecodeError("minutes out of range: " + std::to_string(minutes));
  if (seconds < 0 || seconds > 59) throw TimecodeError("seconds out of range: " + std::to_string(seconds));
  if (frame < 0 || frame >= rate.fps()) {
    throw TimecodeError("frame " + std::to_string(frame) + " not below frame rate " +
                        std::to_string(rate.fps()));
  }
  frames_ = ((hours * 60 + minutes) * 60 + seconds) * rate.fps() + frame;
}

Timecode Timecode::from_frames(std::int64_t frames, FrameRate rate) {
  if (frames < 0) throw TimecodeError("negative frame count");
  Timecode tc;
  tc.frames_ = frames;
  tc.rate_ = rate;
  return tc;
}

Timecode Timecode::from_seconds(double seconds, FrameRate rate) {
  if (!(seconds >= 0.0) || !std::isfinite(seconds)) {
    throw TimecodeError("time must be a finite non-negative number of seconds");
  }
  // Nudge by a relative epsilon so exact frame boundaries such as 90.5 * 30
  // survive binary rounding before the floor.
  const double scaled = seconds * rate.fps();
  auto frames = static_cast<std::int64_t>(std::floor(scaled + scaled * 1e-12 + 1e-9));
  if (static_cast<double>(frames) / rate.fps() > seconds + 1e-9) --frames;
  return from_frames(std::max<std::int64_t>(frames, 0), rate);
}

namespace {

bool parse_field(std::string_view field, std::int64_t& out) {
  if (field.empty()) return false;
  for (char c : field) {
    if (c < '0' || c > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc{} && ptr == field.data() + field.size();
}

}  // namespace

Timecode Timecode::parse(std::string_view text, FrameRate rate) {
  std::int64_t parts[4];
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    const std::size_t colon = i < 3 ? text.find(':', pos) : text.size();
    if (colon == std::string_view::npos) {
      throw TimecodeError("malformed timecode '" + std::string(text) + "': expected HH:MM:SS:FF");
    }
    const auto field = text.substr(pos, colon - pos);
    const bool width_ok = i == 0 ? field.size() >= 2 : field.size() == 2;
    if (!width_ok || !parse_field(field, parts[i])) {
      throw TimecodeError("malformed timecode '" + std::string(text) + "': expected HH:MM:SS:FF");
    }
    pos = colon + 1;
  }
  if (parts[1] > 59 || parts[2] > 59) {
    throw TimecodeError("timecode '" + std::string(text) + "': minutes and seconds must be < 60");
  }
  if (parts[3] >= rate.fps()) {
    throw TimecodeError("timecode '" + std::string(text) + "': frame must be < " +
                        std::to_string(rate.fps()));
  }
  return Timecode(parts[0], static_cast<int>(parts[1]), static_cast<int>(parts[2]),
                  static_cast<int>(parts[3]), rate);
}

std::int64_t Timecode::hours() const noexcept { return frames_ / rate_.fps() / 3600; }
int Timecode::minutes() const noexcept { return static_cast<int>(frames_ / rate_.fps() / 60 % 60); }
int Timecode::seconds() const noexcept { return static_cast<int>(frames_ / rate_.fps() % 60); }
int Timecode::frame() const noexcept { return static_cast<int>(frames_ % rate_.fps()); }

std::string Timecode::to_string() const {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%02lld:%02d:%02d:%02d", static_cast<long long>(hours()), minutes(),
                seconds(), frame());
  return buf;
}

bool operator==(const Timecode& a, const Timecode& b) noexcept {
  return a.frames_ == b.frames_ && a.rate_ == b.rate_;
}

std::strong_ordering operator<=>(const Timecode& a, const Timecode& b) noexcept {
  const auto lhs = static_cast<std::int64_t>(a.frames_) * b.rate_.fps();
  const auto rhs = static_cast<std::int64_t>(b.frames_) * a.rate_.fps();
  if (lhs != rhs) return lhs < rhs ? std::strong_ordering::less : std::strong_ordering::greater;
  return a.rate_.fps() <=> b.rate_.fps();
}

void RatingScale::validate() const {
  if (!(min < 0 && 0 < max)) {
    throw ConfigError("rating scale requires min < 0 < max, got [" + std::to_string(min) + ", " +
                      std::to_string(max) + "]");
  }
}

bool RatingScale::has_default_labels() const noexcept {
  const RatingScale defaults;
  return min_label == defaults.min_label && neutral_label == defaults.neutral_label &&
         max_label == defaults.max_label;
}

Rating rating_clamp(int value, const RatingScale& scale) noexcept {
  return Rating{std::clamp(value, scale.min, scale.max)};
}

}  // namespace corae
