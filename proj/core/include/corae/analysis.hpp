#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corae/annotation.hpp"

namespace corae {

// Interpersonal rating (IR) curve on a uniform grid.
struct RatingSeries {
  double start_time = 0.0;
  double step = 1.0;
  std::vector<int> values;

  double time_at(std::size_t k) const noexcept { return start_time + step * static_cast<double>(k); }
  double end_time() const noexcept { return values.empty() ? start_time : time_at(values.size() - 1); }

  friend bool operator==(const RatingSeries&, const RatingSeries&) = default;
};

// Cumulative interpersonal rating (CIR): prefix sums of an IR curve, same grid.
struct CirSeries {
  double start_time = 0.0;
  double step = 1.0;
  std::vector<std::int64_t> values;

  double time_at(std::size_t k) const noexcept { return start_time + step * static_cast<double>(k); }
  double end_time() const noexcept { return values.empty() ? start_time : time_at(values.size() - 1); }

  friend bool operator==(const CirSeries&, const CirSeries&) = default;
};

struct ResampleResult {
  RatingSeries series;
  // The log has records after `duration`; they were dropped.
  bool truncated = false;
};

// Zero-order hold onto the grid 0, step, 2*step, ... <= duration.
ResampleResult resample(const AnnotationLog& log, double step = 1.0, double duration = 0.0);

CirSeries cumulative(const RatingSeries& ir);

// Number of grid points on each side of a centered window of `window_seconds`.
std::size_t half_window_points(double window_seconds, double step);

// Least-squares slope (value per second) over a centered window at every grid
// point. Windows are truncated at the series ends.
std::vector<double> windowed_slope(std::span<const double> values, double step, double window_seconds);
std::vector<double> windowed_slope(const CirSeries& series, double window_seconds);

// Pearson correlation; nullopt when either input is constant (or sizes differ
// or fewer than two points).
std::optional<double> pearson(std::span<const int> x, std::span<const int> y);

// Centered windowed Pearson correlation at every grid point.
std::vector<std::optional<double>> windowed_correlation(std::span<const int> x, std::span<const int> y,
                                                        std::size_t half_window);

struct DetectorConfig {
  double window_seconds = 15.0;
  double slope_threshold = 0.5;
  double plateau_epsilon = 0.1;
  double sync_correlation_threshold = 0.7;
  double opposition_correlation_threshold = -0.7;
  double rebound_max_lag = 10.0;
  double opposing_slope_ratio_tolerance = 0.5;

  // Throws ConfigError when a value is outside its allowed range.
  void validate(double step = 1.0) const;

  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

enum class EventKind { crossing, drop_rebound, opposing_trends, plateau, synchrony_window, opposition_window };

std::string_view to_string(EventKind kind) noexcept;
EventKind parse_event_kind(std::string_view text);

// Which curve an event belongs to. Pairwise detectors report `dyad`.
enum class Subject { dyad, a, b };

std::string_view to_string(Subject subject) noexcept;
Subject parse_subject(std::string_view text);

struct DetectedEvent {
  EventKind kind = EventKind::crossing;
  Subject subject = Subject::dyad;
  double start = 0.0;
  double end = 0.0;
  std::map<std::string, double> params;

  friend bool operator==(const DetectedEvent&, const DetectedEvent&) = default;
};

// Start time, then kind, then end, then subject.
bool event_order(const DetectedEvent& lhs, const DetectedEvent& rhs) noexcept;

}  // namespace corae
