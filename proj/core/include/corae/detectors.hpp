#pragma once

#include <optional>
#include <vector>

#include "corae/analysis.hpp"

namespace corae {

// One event per strict sign change of a - b, timed by linear interpolation.
// A run of exact ties yields a single event at its first point with
// params["degenerate"] = 1.
std::vector<DetectedEvent> detect_crossings(const CirSeries& a, const CirSeries& b);

// Both curves fall (slope <= -threshold) then recover (slope >= +threshold),
// with drop onsets and rebound onsets each within `rebound_max_lag`.
std::vector<DetectedEvent> detect_drop_rebound(const CirSeries& a, const CirSeries& b,
                                               const DetectorConfig& cfg);

// Maximal intervals where one curve rises and the other falls at comparable rates.
std::vector<DetectedEvent> detect_opposing_trends(const CirSeries& a, const CirSeries& b,
                                                  const DetectorConfig& cfg);

// Maximal intervals at least `window_seconds` long where |slope| <= plateau_epsilon.
std::vector<DetectedEvent> detect_plateaus(const CirSeries& series, const DetectorConfig& cfg,
                                           Subject subject = Subject::a);

// Overlap of both curves' plateaus, kept when at least `window_seconds` long.
std::vector<DetectedEvent> detect_joint_plateaus(const CirSeries& a, const CirSeries& b,
                                                 const DetectorConfig& cfg);

struct SynchronyResult {
  std::vector<std::optional<double>> correlation;
  std::vector<DetectedEvent> events;
};

// Windowed Pearson correlation of two IR curves plus synchrony / opposition windows.
SynchronyResult synchrony_score(const RatingSeries& a, const RatingSeries& b, const DetectorConfig& cfg);

}  // namespace corae
