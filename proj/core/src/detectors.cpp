#include "corae/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "corae/error.hpp"

namespace corae {

namespace {

template <typename S>
void require_aligned(const S& a, const S& b) {
  if (a.values.size() != b.values.size() || a.step != b.step || a.start_time != b.start_time) {
    throw AnalysisError("series must share one grid");
  }
  if (a.values.empty()) throw AnalysisError("series must not be empty");
}

struct Run {
  std::size_t first;
  std::size_t last;  // inclusive
};

// Maximal runs of indices where `pred` holds.
template <typename Pred>
std::vector<Run> runs_where(std::size_t n, Pred pred) {
  std::vector<Run> out;
  std::size_t k = 0;
  while (k < n) {
    if (!pred(k)) {
      ++k;
      continue;
    }
    const std::size_t first = k;
    while (k + 1 < n && pred(k + 1)) ++k;
    out.push_back({first, k});
    ++k;
  }
  return out;
}

double mean_of(const std::vector<double>& v, Run r) {
  double s = 0.0;
  for (std::size_t k = r.first; k <= r.last; ++k) s += v[k];
  return s / static_cast<double>(r.last - r.first + 1);
}

int sign(std::int64_t v) { return (v > 0) - (v < 0); }

}  // namespace

std::vector<DetectedEvent> detect_crossings(const CirSeries& a, const CirSeries& b) {
  require_aligned(a, b);
  const std::size_t n = a.values.size();
  std::vector<DetectedEvent> out;
  std::size_t k = 0;
  while (k < n) {
    const std::int64_t d = a.values[k] - b.values[k];
    if (d == 0) {
      std::size_t last = k;
      while (last + 1 < n && a.values[last + 1] == b.values[last + 1]) ++last;
      DetectedEvent ev{EventKind::crossing, Subject::dyad, a.time_at(k), a.time_at(k), {}};
      ev.params["crossing_time"] = a.time_at(k);
      ev.params["degenerate"] = 1.0;
      ev.params["tie_end"] = a.time_at(last);
      out.push_back(std::move(ev));
      k = last + 1;
      continue;
    }
    if (k + 1 < n) {
      const std::int64_t next = a.values[k + 1] - b.values[k + 1];
      if (next != 0 && sign(next) != sign(d)) {
        const double frac = static_cast<double>(d) / static_cast<double>(d - next);
        const double t = a.time_at(k) + a.step * frac;
        DetectedEvent ev{EventKind::crossing, Subject::dyad, t, t, {}};
        ev.params["crossing_time"] = t;
        ev.params["degenerate"] = 0.0;
        out.push_back(std::move(ev));
      }
    }
    ++k;
  }
  return out;
}

namespace {

struct VShape {
  Run drop;
  Run rebound;
  double depth;
};

std::vector<VShape> find_v_shapes(const CirSeries& s, const std::vector<double>& slope, double threshold) {
  const std::size_t n = slope.size();
  std::vector<std::pair<int, Run>> trend_runs;
  for (auto r : runs_where(n, [&](std::size_t k) { return slope[k] <= -threshold; })) trend_runs.push_back({-1, r});
  for (auto r : runs_where(n, [&](std::size_t k) { return slope[k] >= threshold; })) trend_runs.push_back({+1, r});
  std::sort(trend_runs.begin(), trend_runs.end(),
            [](const auto& x, const auto& y) { return x.second.first < y.second.first; });

  std::vector<VShape> out;
  for (std::size_t i = 0; i + 1 < trend_runs.size(); ++i) {
    if (trend_runs[i].first != -1 || trend_runs[i + 1].first != +1) continue;
    const Run drop = trend_runs[i].second;
    const Run rebound = trend_runs[i + 1].second;
    std::int64_t low = std::numeric_limits<std::int64_t>::max();
    for (std::size_t k = drop.first; k <= rebound.last; ++k) low = std::min(low, s.values[k]);
    out.push_back({drop, rebound, static_cast<double>(s.values[drop.first] - low)});
  }
  return out;
}

}  // namespace

std::vector<DetectedEvent> detect_drop_rebound(const CirSeries& a, const CirSeries& b, const DetectorConfig& cfg) {
  require_aligned(a, b);
  cfg.validate(a.step);
  if (a.values.size() < 2) return {};
  const auto va = find_v_shapes(a, windowed_slope(a, cfg.window_seconds), cfg.slope_threshold);
  const auto vb = find_v_shapes(b, windowed_slope(b, cfg.window_seconds), cfg.slope_threshold);

  std::vector<bool> used(vb.size(), false);
  std::vector<DetectedEvent> out;
  for (const auto& x : va) {
    const double drop_a = a.time_at(x.drop.first);
    const double rebound_a = a.time_at(x.rebound.first);
    std::size_t best = vb.size();
    double best_lag = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < vb.size(); ++j) {
      if (used[j]) continue;
      const double lag = b.time_at(vb[j].drop.first) - drop_a;
      const double rebound_lag = b.time_at(vb[j].rebound.first) - rebound_a;
      if (std::abs(lag) > cfg.rebound_max_lag + 1e-9 || std::abs(rebound_lag) > cfg.rebound_max_lag + 1e-9) continue;
      if (std::abs(lag) < std::abs(best_lag)) {
        best = j;
        best_lag = lag;
      }
    }
    if (best == vb.size()) continue;
    used[best] = true;
    const auto& y = vb[best];
    DetectedEvent ev;
    ev.kind = EventKind::drop_rebound;
    ev.start = std::min(drop_a, b.time_at(y.drop.first));
    ev.end = std::max(a.time_at(x.rebound.last), b.time_at(y.rebound.last));
    ev.params["depth_a"] = x.depth;
    ev.params["depth_b"] = y.depth;
    ev.params["drop_onset_a"] = drop_a;
    ev.params["drop_onset_b"] = b.time_at(y.drop.first);
    ev.params["rebound_onset_a"] = rebound_a;
    ev.params["rebound_onset_b"] = b.time_at(y.rebound.first);
    ev.params["lag"] = best_lag;
    out.push_back(std::move(ev));
  }
  std::sort(out.begin(), out.end(), event_order);
  return out;
}

std::vector<DetectedEvent> detect_opposing_trends(const CirSeries& a, const CirSeries& b,
                                                  const DetectorConfig& cfg) {
  require_aligned(a, b);
  cfg.validate(a.step);
  if (a.values.size() < 2) return {};
  const auto sa = windowed_slope(a, cfg.window_seconds);
  const auto sb = windowed_slope(b, cfg.window_seconds);
  const double thr = cfg.slope_threshold;
  auto opposing = [&](std::size_t k) {
    const bool a_up = sa[k] >= thr && sb[k] <= -thr;
    const bool b_up = sb[k] >= thr && sa[k] <= -thr;
    if (!a_up && !b_up) return false;
    const double ma = std::abs(sa[k]), mb = std::abs(sb[k]);
    return std::abs(ma - mb) / std::max(ma, mb) <= cfg.opposing_slope_ratio_tolerance + 1e-12;
  };

  std::vector<DetectedEvent> out;
  for (auto r : runs_where(sa.size(), opposing)) {
    if (r.first == r.last) continue;
    DetectedEvent ev;
    ev.kind = EventKind::opposing_trends;
    ev.start = a.time_at(r.first);
    ev.end = a.time_at(r.last);
    ev.params["slope_a"] = mean_of(sa, r);
    ev.params["slope_b"] = mean_of(sb, r);
    ev.params["a_rising"] = sa[r.first] > 0 ? 1.0 : 0.0;
    out.push_back(std::move(ev));
  }
  return out;
}

std::vector<DetectedEvent> detect_plateaus(const CirSeries& series, const DetectorConfig& cfg, Subject subject) {
  cfg.validate(series.step);
  if (series.values.empty()) throw AnalysisError("series must not be empty");
  if (series.values.size() < 2) return {};
  const auto slope = windowed_slope(series, cfg.window_seconds);
  std::vector<DetectedEvent> out;
  for (auto r : runs_where(slope.size(), [&](std::size_t k) { return std::abs(slope[k]) <= cfg.plateau_epsilon; })) {
    const double start = series.time_at(r.first);
    const double end = series.time_at(r.last);
    if (end - start + 1e-9 < cfg.window_seconds) continue;
    DetectedEvent ev;
    ev.kind = EventKind::plateau;
    ev.subject = subject;
    ev.start = start;
    ev.end = end;
    ev.params["mean_slope"] = mean_of(slope, r);
    ev.params["level"] = static_cast<double>(series.values[r.first]);
    out.push_back(std::move(ev));
  }
  return out;
}

std::vector<DetectedEvent> detect_joint_plateaus(const CirSeries& a, const CirSeries& b, const DetectorConfig& cfg) {
  require_aligned(a, b);
  const auto pa = detect_plateaus(a, cfg, Subject::a);
  const auto pb = detect_plateaus(b, cfg, Subject::b);
  std::vector<DetectedEvent> out;
  for (const auto& x : pa) {
    for (const auto& y : pb) {
      const double start = std::max(x.start, y.start);
      const double end = std::min(x.end, y.end);
      if (end - start + 1e-9 < cfg.window_seconds) continue;
      DetectedEvent ev;
      ev.kind = EventKind::plateau;
      ev.subject = Subject::dyad;
      ev.start = start;
      ev.end = end;
      ev.params["level_a"] = static_cast<double>(a.values[static_cast<std::size_t>(std::llround((start - a.start_time) / a.step))]);
      ev.params["level_b"] = static_cast<double>(b.values[static_cast<std::size_t>(std::llround((start - b.start_time) / b.step))]);
      out.push_back(std::move(ev));
    }
  }
  std::sort(out.begin(), out.end(), event_order);
  return out;
}

SynchronyResult synchrony_score(const RatingSeries& a, const RatingSeries& b, const DetectorConfig& cfg) {
  require_aligned(a, b);
  cfg.validate(a.step);
  SynchronyResult result;
  result.correlation = windowed_correlation(a.values, b.values, half_window_points(cfg.window_seconds, a.step));
  const auto& corr = result.correlation;

  auto emit = [&](EventKind kind, auto pred) {
    for (auto r : runs_where(corr.size(), [&](std::size_t k) { return corr[k].has_value() && pred(*corr[k]); })) {
      if (r.first == r.last) continue;
      double sum = 0.0;
      double peak = *corr[r.first];
      for (std::size_t k = r.first; k <= r.last; ++k) {
        sum += *corr[k];
        peak = kind == EventKind::synchrony_window ? std::max(peak, *corr[k]) : std::min(peak, *corr[k]);
      }
      DetectedEvent ev;
      ev.kind = kind;
      ev.start = a.time_at(r.first);
      ev.end = a.time_at(r.last);
      ev.params["mean_correlation"] = sum / static_cast<double>(r.last - r.first + 1);
      ev.params["peak_correlation"] = peak;
      result.events.push_back(std::move(ev));
    }
  };
  emit(EventKind::synchrony_window, [&](double r) { return r >= cfg.sync_correlation_threshold; });
  emit(EventKind::opposition_window, [&](double r) { return r <= cfg.opposition_correlation_threshold; });
  std::sort(result.events.begin(), result.events.end(), event_order);
  return result;
}

}  // namespace corae
