#pragma once

#include <cstdint>
#include <optional>

#include "hrm/detector.hpp"
#include "hrm/dsp.hpp"
#include "hrm/signal_model.hpp"

namespace hrm {

/// Everything needed to run the fingertip chain end to end.
struct PipelineConfig {
  PulseTrainSpec pulse;
  double duration_s = 60.0;
  double sample_rate_hz = 500.0;
  OpticalPathSpec optics;
  /// Absent: solve the depth so the divider swing equals pulse.peak_to_peak_mv.
  std::optional<double> modulation_depth;
  DividerSpec divider;
  bool noise_enabled = true;
  NoiseSpec noise = NoiseSpec::ambient_default();
  FilterSpec filter;
  /// Explicit coefficients override the design from `filter`.
  std::optional<FilterCoefficients> coefficients;
  AmplifierSpec amplifier;
  DetectorConfig detector;
  /// Seeds the white noise; overrides noise.rng_seed.
  std::uint64_t seed = 7;
  /// Leading span excluded from post-filter SNR measurements (filter settling).
  double settle_s = 5.0;

  /// Checks every section against its owning type's invariants plus the
  /// cross-field constraints (cutoffs and noise tones below Nyquist).
  void validate() const;
  [[nodiscard]] FilterCoefficients filter_coefficients() const;
};

struct PipelineResult {
  SampledSignal raw;
  SampledSignal noisy;
  SampledSignal filtered;
  AmplifiedSignal amplified;
  DetectionResult detection;
};

/// Pulse-to-voltage front end: synthesize, optical path, divider, noise.
[[nodiscard]] SampledSignal synthesize_sensor_signal(const PipelineConfig& cfg);
/// Sensor voltage before noise injection.
[[nodiscard]] SampledSignal synthesize_raw(const PipelineConfig& cfg);
[[nodiscard]] SampledSignal inject_noise(const SampledSignal& raw, const PipelineConfig& cfg);

[[nodiscard]] PipelineResult run_pipeline(const PipelineConfig& cfg);

/// Drops the first `seconds` of a signal, advancing t0 accordingly.
[[nodiscard]] SampledSignal trim_leading(const SampledSignal& signal, double seconds);

}  // namespace hrm
