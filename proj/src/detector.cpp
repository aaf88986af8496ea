#include "hrm/detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace hrm {

std::string_view to_string(DetectionMode mode) noexcept {
  return mode == DetectionMode::kWindowCount ? "window_count" : "interval_average";
}

DetectionMode parse_detection_mode(std::string_view text) {
  if (text == "window" || text == "window_count") return DetectionMode::kWindowCount;
  if (text == "interval" || text == "interval_average") return DetectionMode::kIntervalAverage;
  throw ValidationError("unknown detector mode '" + std::string(text) + "'");
}

void DetectorConfig::validate() const {
  if (!(std::isfinite(threshold_v) && std::isfinite(hysteresis_v) && hysteresis_v > 0.0)) {
    throw ValidationError("hysteresis_v must be positive");
  }
  if (!(rail_low_v < rail_high_v)) throw ValidationError("detector rails are inverted");
  if (!(threshold_v - hysteresis_v > rail_low_v)) {
    throw ValidationError("threshold_v - hysteresis_v must exceed rail_low_v");
  }
  if (threshold_v > rail_high_v) throw ValidationError("threshold_v above rail_high_v");
  if (!(std::isfinite(min_bpm) && std::isfinite(max_bpm) && min_bpm > 0.0 && min_bpm < max_bpm)) {
    throw ValidationError("detector bpm range must satisfy 0 < min_bpm < max_bpm");
  }
  if (!(std::isfinite(refractory_s) && refractory_s > 0.0 && refractory_s < 60.0 / max_bpm)) {
    throw ValidationError("refractory_s must be positive and below 60/max_bpm");
  }
  if (window_s != 5 && window_s != 10) throw ValidationError("window_s must be 5 or 10");
  if (pulses_to_average < 1) throw ValidationError("pulses_to_average must be >= 1");
}

DetectorStep process_sample(DetectorState state, double t_s, double v, const DetectorConfig& cfg) {
  if (!std::isfinite(t_s)) throw ValidationError("sample time is not finite");
  if (!std::isfinite(v)) throw ValidationError("sample value is not finite");
  if (state.last_sample_t_s && !(t_s > *state.last_sample_t_s)) {
    throw ValidationError("non-monotone timestamps");
  }

  std::optional<double> edge;
  if (!state.last_sample_t_s) {
    state.window_start_t_s = t_s;
    state.armed = v < cfg.threshold_v;
  } else if (state.armed && v >= cfg.threshold_v) {
    state.armed = false;
    if (!state.last_edge_t_s || t_s - *state.last_edge_t_s >= cfg.refractory_s) {
      edge = t_s;
      state.last_edge_t_s = t_s;
      state.edge_times_s.push_back(t_s);
    }
  } else if (!state.armed && v <= cfg.threshold_v - cfg.hysteresis_v) {
    state.armed = true;
  }
  state.last_sample_t_s = t_s;
  return {std::move(state), edge};
}

std::optional<double> bpm_window_count(std::span<const double> edges_s, int window_s,
                                       double window_end_s, double stream_start_s) {
  if (window_s != 5 && window_s != 10) throw ValidationError("window_s must be 5 or 10");
  const double window = static_cast<double>(window_s);
  if (window_end_s - stream_start_s < window - 1e-9) return std::nullopt;
  const double window_begin = window_end_s - window;
  const auto count = std::count_if(edges_s.begin(), edges_s.end(), [&](double t) {
    return t > window_begin && t <= window_end_s;
  });
  const int per_minute = 60 / window_s;
  return static_cast<double>(count * per_minute);
}

std::optional<double> bpm_interval_average(std::span<const double> edges_s, int n) {
  if (n < 1) throw ValidationError("pulses_to_average must be >= 1");
  const auto needed = static_cast<std::size_t>(n) + 1;
  if (edges_s.size() < needed) return std::nullopt;
  const std::size_t last = edges_s.size() - 1;
  double sum = 0.0;
  for (std::size_t i = last + 1 - static_cast<std::size_t>(n); i <= last; ++i) {
    sum += edges_s[i] - edges_s[i - 1];
  }
  return 60.0 / (sum / static_cast<double>(n));
}

PulseDetector::PulseDetector(DetectorConfig cfg, double sample_rate_hz, double t0_s)
    : cfg_(std::move(cfg)), sample_rate_hz_(sample_rate_hz), t0_s_(t0_s) {
  cfg_.validate();
  if (!(std::isfinite(sample_rate_hz_) && sample_rate_hz_ > 0.0)) {
    throw ValidationError("sample_rate_hz must be positive");
  }
}

void PulseDetector::push(std::span<const double> samples) {
  for (double v : samples) {
    const double t = t0_s_ + static_cast<double>(n_samples_) / sample_rate_hz_;
    state_ = process_sample(std::move(state_), t, v, cfg_).state;
    if (v <= cfg_.rail_low_v || v >= cfg_.rail_high_v) ++n_railed_;
    ++n_samples_;
  }
}

DetectionResult PulseDetector::result() const {
  DetectionResult r;
  r.mode = cfg_.mode;
  r.edges_s = state_.edge_times_s;
  for (std::size_t i = 1; i < r.edges_s.size(); ++i) {
    r.intervals_s.push_back(r.edges_s[i] - r.edges_s[i - 1]);
  }
  if (cfg_.mode == DetectionMode::kWindowCount) {
    const double end = t0_s_ + static_cast<double>(n_samples_) / sample_rate_hz_;
    r.bpm = bpm_window_count(r.edges_s, cfg_.window_s, end, t0_s_);
  } else {
    r.bpm = bpm_interval_average(r.edges_s, cfg_.pulses_to_average);
  }
  // Edge times are t0 + i/rate in floating point, so an exact 125 bpm train
  // can average to 125.00000000000007.
  constexpr double kSlack = 1e-9;
  r.valid = r.bpm && *r.bpm >= cfg_.min_bpm - kSlack && *r.bpm <= cfg_.max_bpm + kSlack;
  r.saturation_warning = 2 * n_railed_ > n_samples_;
  return r;
}

DetectionResult run_detector(const SampledSignal& signal, const DetectorConfig& cfg) {
  signal.validate();
  if (signal.empty()) throw ValidationError("no samples");
  PulseDetector detector(cfg, signal.sample_rate_hz, signal.t0_s);
  detector.push(signal.samples);
  return detector.result();
}

}  // namespace hrm
