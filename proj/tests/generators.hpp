#pragma once

// Synthetic inputs: random annotation sessions and piecewise IR curves with
// planted events.

#include <random>
#include <utility>
#include <vector>

#include "corae/analysis.hpp"
#include "corae/annotation.hpp"

namespace corae::gen {

// Plays through `seconds` of media at `fps`, pressing random arrows and
// occasionally pausing. Always yields a valid log.
inline AnnotationLog random_session(std::mt19937_64& rng, double seconds, int fps = 30, RatingScale scale = {}) {
  Annotator annotator(AnnotationLog::start("s", "p", FrameRate(fps), scale));
  annotator.toggle();
  std::uniform_int_distribution<int> action(0, 99);
  const auto total = static_cast<std::int64_t>(seconds * fps);
  for (std::int64_t frame = 1; frame <= total; ++frame) {
    annotator.advance_to(Timecode::from_frames(frame, FrameRate(fps)));
    const int a = action(rng);
    if (a < 3) annotator.press(Direction::left);
    else if (a < 6) annotator.press(Direction::right);
    else if (a == 6) annotator.toggle();
    else if (a == 7 && !annotator.state().playing) annotator.toggle();
  }
  return std::move(annotator).take_log();
}

// IR curve built from (value, seconds) segments on a 1 s grid.
inline RatingSeries piecewise(const std::vector<std::pair<int, int>>& segments) {
  RatingSeries s;
  for (auto [value, length] : segments) s.values.insert(s.values.end(), static_cast<std::size_t>(length), value);
  return s;
}

// A log whose 1 Hz resample is exactly `ir` (one interval record per second,
// stepping through intermediate values within the second to stay continuous).
inline AnnotationLog log_from_ir(const RatingSeries& ir, const std::string& participant, int fps = 30) {
  const FrameRate rate(fps);
  AnnotationLog log = AnnotationLog::start("fixture", participant, rate);
  log.records.front().rating = Rating{ir.values.front()};
  for (std::size_t k = 1; k < ir.values.size(); ++k) {
    int current = log.records.back().rating.value;
    const int target = ir.values[k];
    const std::int64_t base = static_cast<std::int64_t>(k) * fps;
    if (current == target) {
      log.records.push_back({Rating{target}, Timecode::from_frames(base, rate), RecordCause::interval});
      continue;
    }
    // Intermediate steps land in the frames just before the grid point.
    const int steps = std::abs(target - current);
    for (int i = 1; i <= steps; ++i) {
      current += target > current ? 1 : -1;
      const auto at = base - (steps - i);
      log.records.push_back({Rating{current}, Timecode::from_frames(at, rate), RecordCause::change});
    }
  }
  return log;
}

}  // namespace corae::gen

namespace corae::gen {

// Planted-event scenarios on a 1 s grid. `truth_start`/`truth_end` give the
// ground-truth interval of the planted event in seconds.
struct Planted {
  RatingSeries a;
  RatingSeries b;
  double truth_start = 0.0;
  double truth_end = 0.0;
};

// Both participants dip for `depth` seconds from `onset`, then recover; b lags
// a by `lag` seconds. Total length `length`.
inline Planted v_drop_pair(int lag = 5, int onset = 30, int depth = 20, int length = 120) {
  return {piecewise({{0, onset}, {-1, depth}, {1, depth}, {0, length - onset - 2 * depth}}),
          piecewise({{0, onset + lag}, {-1, depth}, {1, depth}, {0, length - onset - lag - 2 * depth}}),
          static_cast<double>(onset), static_cast<double>(onset + lag + 2 * depth)};
}

inline Planted v_drop_one_sided(int onset = 30, int depth = 20, int length = 120) {
  return {piecewise({{0, onset}, {-1, depth}, {1, depth}, {0, length - onset - 2 * depth}}), piecewise({{0, length}}),
          0, 0};
}

// CIR of a rises while b falls at the same rate for `span` seconds from `onset`.
inline Planted opposite_slopes(int onset = 30, int span = 40, int length = 100) {
  return {piecewise({{0, onset}, {1, span}, {0, length - onset - span}}),
          piecewise({{0, onset}, {-1, span}, {0, length - onset - span}}), static_cast<double>(onset),
          static_cast<double>(onset + span)};
}

inline Planted same_slopes(int onset = 30, int span = 40, int length = 100) {
  auto p = opposite_slopes(onset, span, length);
  p.b = p.a;
  p.truth_start = p.truth_end = 0;
  return p;
}

// Rise for `ramp` seconds, hold for `flat`, fall for `ramp`. The CIR is flat
// from index ramp - 1 through ramp + flat - 1.
inline RatingSeries trapezoid(int ramp = 30, int flat = 30) { return piecewise({{1, ramp}, {0, flat}, {-1, ramp}}); }

inline std::vector<int> wiggle(int length, int sign = 1) {
  static const int pattern[] = {2, -1, 3, 0, -2, 1};
  std::vector<int> out;
  for (int i = 0; i < length; ++i) out.push_back(sign * pattern[i % 6]);
  return out;
}

// Identical (or mirrored, when `sign` is -1) non-constant IR for `span`
// seconds from `onset`; zero elsewhere.
inline Planted correlated_window(int sign = 1, int onset = 40, int span = 40, int length = 120) {
  Planted p;
  p.a = piecewise({{0, onset}});
  p.b = p.a;
  auto wa = wiggle(span, 1), wb = wiggle(span, sign);
  p.a.values.insert(p.a.values.end(), wa.begin(), wa.end());
  p.b.values.insert(p.b.values.end(), wb.begin(), wb.end());
  p.a.values.insert(p.a.values.end(), static_cast<std::size_t>(length - onset - span), 0);
  p.b.values.insert(p.b.values.end(), static_cast<std::size_t>(length - onset - span), 0);
  p.truth_start = onset;
  p.truth_end = onset + span - 1;
  return p;
}

// a moves, b never does: every correlation is undefined.
inline Planted uncorrelated_window(int onset = 40, int span = 40, int length = 120) {
  Planted p = correlated_window(1, onset, span, length);
  p.b = piecewise({{1, length}});
  return p;
}

}  // namespace corae::gen
