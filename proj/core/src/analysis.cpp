#include "corae/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "corae/error.hpp"

namespace corae {

namespace {
constexpr double kTimeEps = 1e-9;
}

ResampleResult resample(const AnnotationLog& log, double step, double duration) {
  if (log.records.empty()) throw AnalysisError("cannot resample an empty log");
  if (!(step > 0.0) || !std::isfinite(step)) throw AnalysisError("resample step must be positive");
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw AnalysisError("duration must be >= 0");
  require_valid(log);

  const auto points = static_cast<std::size_t>(std::floor(duration / step + kTimeEps)) + 1;
  ResampleResult result;
  result.series.start_time = 0.0;
  result.series.step = step;
  result.series.values.resize(points);

  const auto& recs = log.records;
  std::size_t next = 0;
  int held = recs.front().rating.value;
  for (std::size_t k = 0; k < points; ++k) {
    const double t = step * static_cast<double>(k);
    while (next < recs.size() && recs[next].timecode.total_seconds() <= t + kTimeEps) {
      held = recs[next].rating.value;
      ++next;
    }
    result.series.values[k] = held;
  }
  result.truncated = recs.back().timecode.total_seconds() > duration + kTimeEps;
  return result;
}

CirSeries cumulative(const RatingSeries& ir) {
  CirSeries cir;
  cir.start_time = ir.start_time;
  cir.step = ir.step;
  cir.values.resize(ir.values.size());
  std::int64_t sum = 0;
  for (std::size_t k = 0; k < ir.values.size(); ++k) {
    sum += ir.values[k];
    cir.values[k] = sum;
  }
  return cir;
}

std::size_t half_window_points(double window_seconds, double step) {
  if (!(step > 0.0)) throw AnalysisError("step must be positive");
  if (window_seconds + kTimeEps < 2.0 * step) {
    throw AnalysisError("window must span at least two grid steps");
  }
  return static_cast<std::size_t>(std::floor(window_seconds / (2.0 * step) + kTimeEps));
}

namespace {

// Prefix sums of y and j*y give each window's regression in O(1). `Acc` is
// exact for integer inputs.
template <typename Acc, typename T>
std::vector<double> slopes_from_prefix(std::span<const T> values, double step, std::size_t half) {
  const std::size_t n = values.size();
  if (n < 2) throw AnalysisError("slope needs at least two points");
  std::vector<Acc> sum_y(n + 1, Acc{}), sum_jy(n + 1, Acc{});
  for (std::size_t j = 0; j < n; ++j) {
    sum_y[j + 1] = sum_y[j] + static_cast<Acc>(values[j]);
    sum_jy[j + 1] = sum_jy[j] + static_cast<Acc>(j) * static_cast<Acc>(values[j]);
  }
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k >= half ? k - half : 0;
    const std::size_t hi = std::min(n - 1, k + half);
    const auto m = static_cast<Acc>(hi - lo + 1);
    // Sums of j and j^2 over [lo, hi].
    auto tri = [](std::size_t x) { return static_cast<Acc>(x) * static_cast<Acc>(x + 1) / 2; };
    auto sq = [](std::size_t x) {
      return static_cast<Acc>(x) * static_cast<Acc>(x + 1) * static_cast<Acc>(2 * x + 1) / 6;
    };
    const Acc sj = tri(hi) - (lo ? tri(lo - 1) : Acc{});
    const Acc sjj = sq(hi) - (lo ? sq(lo - 1) : Acc{});
    const Acc sy = sum_y[hi + 1] - sum_y[lo];
    const Acc sjy = sum_jy[hi + 1] - sum_jy[lo];
    const Acc num = m * sjy - sj * sy;
    const Acc den = m * sjj - sj * sj;
    out[k] = static_cast<double>(num) / static_cast<double>(den) / step;
  }
  return out;
}

}  // namespace

std::vector<double> windowed_slope(std::span<const double> values, double step, double window_seconds) {
  return slopes_from_prefix<long double>(values, step, half_window_points(window_seconds, step));
}

std::vector<double> windowed_slope(const CirSeries& series, double window_seconds) {
  return slopes_from_prefix<__int128>(std::span<const std::int64_t>(series.values), series.step,
                                      half_window_points(window_seconds, series.step));
}

namespace {

std::optional<double> correlation_from_sums(std::int64_t n, std::int64_t sx, std::int64_t sy, std::int64_t sxy,
                                            std::int64_t sxx, std::int64_t syy) {
  // n*cov and n*var, exact in integers.
  const auto cov = static_cast<__int128>(n) * sxy - static_cast<__int128>(sx) * sy;
  const auto vx = static_cast<__int128>(n) * sxx - static_cast<__int128>(sx) * sx;
  const auto vy = static_cast<__int128>(n) * syy - static_cast<__int128>(sy) * sy;
  if (vx == 0 || vy == 0) return std::nullopt;
  const double r = static_cast<double>(cov) / std::sqrt(static_cast<double>(vx) * static_cast<double>(vy));
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace

std::optional<double> pearson(std::span<const int> x, std::span<const int> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  std::int64_t sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxy += static_cast<std::int64_t>(x[i]) * y[i];
    sxx += static_cast<std::int64_t>(x[i]) * x[i];
    syy += static_cast<std::int64_t>(y[i]) * y[i];
  }
  return correlation_from_sums(static_cast<std::int64_t>(x.size()), sx, sy, sxy, sxx, syy);
}

std::vector<std::optional<double>> windowed_correlation(std::span<const int> x, std::span<const int> y,
                                                        std::size_t half_window) {
  if (x.size() != y.size()) throw AnalysisError("correlation inputs must be aligned");
  const std::size_t n = x.size();
  std::vector<std::int64_t> px(n + 1), py(n + 1), pxy(n + 1), pxx(n + 1), pyy(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    px[i + 1] = px[i] + x[i];
    py[i + 1] = py[i] + y[i];
    pxy[i + 1] = pxy[i] + static_cast<std::int64_t>(x[i]) * y[i];
    pxx[i + 1] = pxx[i] + static_cast<std::int64_t>(x[i]) * x[i];
    pyy[i + 1] = pyy[i] + static_cast<std::int64_t>(y[i]) * y[i];
  }
  std::vector<std::optional<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k >= half_window ? k - half_window : 0;
    const std::size_t hi = std::min(n - 1, k + half_window) + 1;
    out[k] = correlation_from_sums(static_cast<std::int64_t>(hi - lo), px[hi] - px[lo], py[hi] - py[lo],
                                   pxy[hi] - pxy[lo], pxx[hi] - pxx[lo], pyy[hi] - pyy[lo]);
  }
  return out;
}

void DetectorConfig::validate(double step) const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(window_seconds) || window_seconds + kTimeEps < 2.0 * step) {
    throw ConfigError("window_seconds must be at least two grid steps");
  }
  if (!finite(slope_threshold) || slope_threshold <= 0.0) throw ConfigError("slope_threshold must be > 0");
  if (!finite(plateau_epsilon) || plateau_epsilon < 0.0) throw ConfigError("plateau_epsilon must be >= 0");
  if (!finite(sync_correlation_threshold) || sync_correlation_threshold < -1.0 ||
      sync_correlation_threshold > 1.0) {
    throw ConfigError("sync_correlation_threshold must lie in [-1, 1]");
  }
  if (!finite(opposition_correlation_threshold) || opposition_correlation_threshold < -1.0 ||
      opposition_correlation_threshold > 1.0) {
    throw ConfigError("opposition_correlation_threshold must lie in [-1, 1]");
  }
  if (opposition_correlation_threshold >= sync_correlation_threshold) {
    throw ConfigError("opposition threshold must be below the synchrony threshold");
  }
  if (!finite(rebound_max_lag) || rebound_max_lag < 0.0) throw ConfigError("rebound_max_lag must be >= 0");
  if (!finite(opposing_slope_ratio_tolerance) || opposing_slope_ratio_tolerance < 0.0 ||
      opposing_slope_ratio_tolerance > 1.0) {
    throw ConfigError("opposing_slope_ratio_tolerance must lie in [0, 1]");
  }
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::crossing: return "crossing";
    case EventKind::drop_rebound: return "drop_rebound";
    case EventKind::opposing_trends: return "opposing_trends";
    case EventKind::plateau: return "plateau";
    case EventKind::synchrony_window: return "synchrony_window";
    case EventKind::opposition_window: return "opposition_window";
  }
  return "unknown";
}

EventKind parse_event_kind(std::string_view text) {
  for (auto kind : {EventKind::crossing, EventKind::drop_rebound, EventKind::opposing_trends, EventKind::plateau,
                    EventKind::synchrony_window, EventKind::opposition_window}) {
    if (to_string(kind) == text) return kind;
  }
  throw AnalysisError("unknown event kind '" + std::string(text) + "'");
}

std::string_view to_string(Subject subject) noexcept {
  switch (subject) {
    case Subject::dyad: return "dyad";
    case Subject::a: return "a";
    case Subject::b: return "b";
  }
  return "unknown";
}

Subject parse_subject(std::string_view text) {
  if (text == "dyad") return Subject::dyad;
  if (text == "a") return Subject::a;
  if (text == "b") return Subject::b;
  throw AnalysisError("unknown event subject '" + std::string(text) + "'");
}

bool event_order(const DetectedEvent& lhs, const DetectedEvent& rhs) noexcept {
  if (lhs.start != rhs.start) return lhs.start < rhs.start;
  if (lhs.kind != rhs.kind) return lhs.kind < rhs.kind;
  if (lhs.end != rhs.end) return lhs.end < rhs.end;
  return lhs.subject < rhs.subject;
}

}  // namespace corae
