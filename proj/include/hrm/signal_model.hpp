#pragma once

#include <cstdint>
#include <optional>

#include "hrm/signal.hpp"

namespace hrm {

enum class BeatFamily {
  kRaisedCosine,  // single symmetric lobe, 0.5(1 - cos) over the systolic width
  kTwoLobe,       // fast systolic rise, slower decay, dicrotic bump
};

struct BeatShape {
  BeatFamily family = BeatFamily::kTwoLobe;
  /// Fraction of the beat period spanned by the systolic lobe, in (0, 1].
  double systolic_width_fraction = 0.9;
  /// Dicrotic bump height relative to the systolic lobe, in [0, 1).
  /// Ignored by the raised-cosine family.
  double dicrotic_fraction = 0.2;
};

/// Physiological ground truth for a synthetic beat train.
struct PulseTrainSpec {
  double bpm = 72.0;
  BeatShape beat_shape;
  double peak_to_peak_mv = 10.0;
  double phase_s = 0.0;

  void validate() const;
};

struct OpticalPathSpec {
  double emitted_power = 1.0;
  /// Fraction of emitted light lost in the finger; 0.8 means 20% is received.
  double attenuation_fraction = 0.8;
  double pulsatile_modulation_depth = 0.01;

  void validate() const;
  [[nodiscard]] double received_baseline_power() const noexcept {
    return emitted_power * (1.0 - attenuation_fraction);
  }
};

/// Photo-resistor in series with a fixed resistor across the supply; the
/// output is taken across the fixed resistor.
struct DividerSpec {
  double supply_v = 5.0;
  double fixed_resistance_ohm = 82'000.0;
  double r_dark_ohm = 1'000'000.0;
  double r_bright_ohm = 100.0;
  double power_scale = 0.01;
  double gamma = 0.8;

  void validate() const;
  /// Strictly decreasing in received power; r_dark at zero power, tends to r_bright.
  [[nodiscard]] double ldr_resistance(double received_power) const;
  [[nodiscard]] double output_voltage(double received_power) const;
};

struct DriftSpec {
  double amplitude_v = 0.0;
  double frequency_hz = 0.05;
};

struct NoiseSpec {
  double mains_hz = 60.0;
  double mains_amplitude_v = 0.0;
  double ambient_flicker_hz = 120.0;
  double ambient_amplitude_v = 0.0;
  double dc_offset_v = 0.0;
  DriftSpec drift;
  double white_noise_std_v = 0.0;
  std::optional<double> target_snr_db;
  std::uint64_t rng_seed = 0;

  void validate() const;
  /// True when every component is zero and no target is set.
  [[nodiscard]] bool is_identity() const noexcept;

  /// Mains 60 Hz + 120 Hz flicker dominated mix with small drift and white
  /// noise, mixed to -14 dB SNR.
  static NoiseSpec ambient_default();
};

/// Periodic, mean-removed beat train with peak-to-peak amplitude
/// spec.peak_to_peak_mv (converted to volts). Length is
/// round(duration_s * sample_rate_hz).
[[nodiscard]] SampledSignal synthesize_ppg(const PulseTrainSpec& spec, double duration_s,
                                           double sample_rate_hz);

/// Scales emitted power by (1 - attenuation). When a beat waveform is given,
/// the received power is further modulated by
/// (1 - depth * (1 - b)), where b is the beat normalized to [0, 1]; the beat
/// peak therefore corresponds to the least absorbed light.
[[nodiscard]] SampledSignal apply_optical_path(const SampledSignal& emitted,
                                               const OpticalPathSpec& path,
                                               const SampledSignal* beat = nullptr);

[[nodiscard]] SampledSignal ldr_to_voltage(const SampledSignal& received_power,
                                           const DividerSpec& divider);

/// Modulation depth at which a full-scale beat swings the divider output by
/// target_swing_v. Solved by bisection on the monotone divider curve.
[[nodiscard]] double calibrate_modulation_depth(const OpticalPathSpec& path,
                                                const DividerSpec& divider,
                                                double target_swing_v);

/// Adds deterministic sinusoids, DC offset, drift and seeded white noise. With
/// target_snr_db set, all noise amplitudes are rescaled by one common factor
/// until estimate_snr over the default heart band matches the target.
[[nodiscard]] SampledSignal add_noise(const SampledSignal& clean, const NoiseSpec& noise);

}  // namespace hrm
