#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace corae {

// Frames per second of a media file. Always >= 1.
class FrameRate {
 public:
  static constexpr int kDefault = 30;

  constexpr FrameRate() = default;
  explicit FrameRate(int frames_per_second);

  constexpr int fps() const noexcept { return fps_; }

  friend constexpr bool operator==(FrameRate, FrameRate) = default;

 private:
  int fps_ = kDefault;
};

// Frame-accurate media position in HH:MM:SS:FF form (non-drop-frame).
//
// Stored as a frame count; the hour/minute/second/frame view is derived, so
// every Timecode is canonical by construction.
class Timecode {
 public:
  constexpr Timecode() = default;
  Timecode(std::int64_t hours, int minutes, int seconds, int frame, FrameRate rate = {});

  static Timecode from_frames(std::int64_t frames, FrameRate rate = {});
  // Floors to the frame boundary at or before `seconds`.
  static Timecode from_seconds(double seconds, FrameRate rate = {});
  // Accepts exactly HH:MM:SS:FF (hours may have more than two digits).
  static Timecode parse(std::string_view text, FrameRate rate = {});

  std::int64_t hours() const noexcept;
  int minutes() const noexcept;
  int seconds() const noexcept;
  int frame() const noexcept;
  std::int64_t total_frames() const noexcept { return frames_; }
  FrameRate frame_rate() const noexcept { return rate_; }

  double total_seconds() const noexcept {
    return static_cast<double>(frames_) / rate_.fps();
  }

  std::string to_string() const;

  friend bool operator==(const Timecode& a, const Timecode& b) noexcept;
  // Orders by media time; mixed frame rates compare exactly by cross-multiplication.
  friend std::strong_ordering operator<=>(const Timecode& a, const Timecode& b) noexcept;

 private:
  std::int64_t frames_ = 0;
  FrameRate rate_{};
};

struct RatingScale {
  int min = -7;
  int max = 7;
  std::string min_label = "Disagreeable";
  std::string neutral_label = "Neutral";
  std::string max_label = "Agreeable";

  // Throws ConfigError unless min < 0 < max.
  void validate() const;

  int point_count() const noexcept { return max - min + 1; }
  bool contains(int value) const noexcept { return value >= min && value <= max; }
  bool has_default_labels() const noexcept;

  friend bool operator==(const RatingScale&, const RatingScale&) = default;
};

struct Rating {
  int value = 0;

  friend constexpr auto operator<=>(Rating, Rating) = default;
};

Rating rating_clamp(int value, const RatingScale& scale) noexcept;

}  // namespace corae
