#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hrm/signal.hpp"

namespace hrm {

enum class DetectionMode {
  kWindowCount,      // edges in the most recent 5 s or 10 s, times 12 or 6
  kIntervalAverage,  // 60 / mean of the last n inter-edge intervals
};

[[nodiscard]] std::string_view to_string(DetectionMode mode) noexcept;
[[nodiscard]] DetectionMode parse_detection_mode(std::string_view text);

struct DetectorConfig {
  double threshold_v = 1.2;
  double hysteresis_v = 0.2;
  double refractory_s = 0.25;
  DetectionMode mode = DetectionMode::kIntervalAverage;
  int window_s = 5;
  int pulses_to_average = 5;
  double min_bpm = 30.0;
  double max_bpm = 125.0;
  /// Rails of the amplifier feeding the detector, used for the saturation
  /// warning and the re-arm level check.
  double rail_low_v = 0.0;
  double rail_high_v = 5.0;

  void validate() const;
};

struct DetectorState {
  bool armed = false;
  std::optional<double> last_edge_t_s;
  std::optional<double> last_sample_t_s;
  std::vector<double> edge_times_s;
  std::optional<double> window_start_t_s;
};

struct DetectorStep {
  DetectorState state;
  std::optional<double> edge_t_s;
};

/// One step of the rising-edge state machine. An edge fires when the detector
/// is armed, v >= threshold and the refractory period since the previous edge
/// has elapsed. A crossing inside the refractory period disarms without
/// firing. Re-arming requires v <= threshold - hysteresis.
[[nodiscard]] DetectorStep process_sample(DetectorState state, double t_s, double v,
                                          const DetectorConfig& cfg);

/// Edges in the half-open window (window_end_s - window_s, window_end_s],
/// times 60 / window_s. Absent when fewer than window_s seconds separate
/// stream_start_s and window_end_s.
[[nodiscard]] std::optional<double> bpm_window_count(std::span<const double> edges_s,
                                                     int window_s, double window_end_s,
                                                     double stream_start_s = 0.0);

/// 60 / mean of the last n intervals; absent until n + 1 edges exist.
[[nodiscard]] std::optional<double> bpm_interval_average(std::span<const double> edges_s,
                                                         int n = 5);

struct DetectionResult {
  std::optional<double> bpm;
  bool valid = false;
  std::vector<double> edges_s;
  std::vector<double> intervals_s;
  DetectionMode mode = DetectionMode::kIntervalAverage;
  bool saturation_warning = false;

  friend bool operator==(const DetectionResult&, const DetectionResult&) = default;
};

/// Incremental front end over process_sample. Samples may be pushed in any
/// chunking; timestamps derive from the global sample index so the result
/// does not depend on chunk boundaries.
class PulseDetector {
 public:
  PulseDetector(DetectorConfig cfg, double sample_rate_hz, double t0_s = 0.0);

  void push(std::span<const double> samples);
  [[nodiscard]] DetectionResult result() const;
  [[nodiscard]] const DetectorState& state() const noexcept { return state_; }

 private:
  DetectorConfig cfg_;
  double sample_rate_hz_;
  double t0_s_;
  std::size_t n_samples_ = 0;
  std::size_t n_railed_ = 0;
  DetectorState state_;
};

[[nodiscard]] DetectionResult run_detector(const SampledSignal& signal, const DetectorConfig& cfg);

}  // namespace hrm
