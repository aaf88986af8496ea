#pragma once

#include <span>
#include <vector>

#include "hrm/signal.hpp"

namespace hrm {

enum class DesignFamily { kButterworth };

struct FilterSpec {
  double low_cutoff_hz = 0.5;
  double high_cutoff_hz = 2.5;
  int order_per_edge = 2;
  DesignFamily design_family = DesignFamily::kButterworth;

  void validate(double sample_rate_hz) const;
};

/// One second-order recursive section,
/// H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
struct Biquad {
  double b0 = 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;

  /// Both poles strictly inside the unit circle.
  [[nodiscard]] bool is_stable() const noexcept;

  friend bool operator==(const Biquad&, const Biquad&) = default;
};

struct FilterCoefficients {
  std::vector<Biquad> sections;
  double sample_rate_hz = 500.0;

  /// Rejects an empty cascade, a nonpositive rate or any unstable section.
  void validate() const;

  friend bool operator==(const FilterCoefficients&, const FilterCoefficients&) = default;
};

struct AmplifierSpec {
  double gain_db = 40.0;
  double offset_v = 1.0;
  double rail_low_v = 0.0;
  double rail_high_v = 5.0;

  void validate() const;
  [[nodiscard]] double linear_gain() const noexcept;
};

struct AmplifiedSignal {
  SampledSignal signal;
  /// Fraction of samples whose unclipped value fell outside the rails.
  double saturation_fraction = 0.0;
};

struct BandSpec {
  double f_low_hz = 0.5;
  double f_high_hz = 2.5;

  void validate() const;
};

/// Welch parameters pinned for estimate_snr.
inline constexpr double kSnrSegmentSeconds = 4.0;

/// Maximally-flat band-pass: order_per_edge high-pass poles at the low corner
/// and as many low-pass poles at the high corner, each discretized with the
/// bilinear transform (corners pre-warped). The cascade is scaled to unity
/// gain at the geometric band centre.
[[nodiscard]] FilterCoefficients design_bandpass(const FilterSpec& spec, double sample_rate_hz);

/// Cascaded transposed direct-form II, zero initial state.
[[nodiscard]] SampledSignal filter_signal(const SampledSignal& signal,
                                          const FilterCoefficients& coeffs);

/// out = clamp(offset + gain * in, rail_low, rail_high).
[[nodiscard]] AmplifiedSignal amplify(const SampledSignal& signal, const AmplifierSpec& amp);

/// Magnitude in dB of the cascade at each frequency. Magnitudes below 1e-20
/// are reported as -400 dB.
[[nodiscard]] std::vector<double> frequency_response(const FilterCoefficients& coeffs,
                                                     std::span<const double> freqs_hz);

/// In-band over out-of-band power of a Welch PSD estimate (Hann window, 4 s
/// segments, 50% overlap, whole-signal mean removed first). The DC bin is
/// excluded from both sums; band edges are inclusive.
[[nodiscard]] double estimate_snr(const SampledSignal& signal, const BandSpec& band = {});

/// One-sided Welch PSD (V^2/Hz) with the estimator's parameters. Index k
/// corresponds to k * sample_rate / segment_length.
struct PowerSpectrum {
  double bin_hz = 0.0;
  std::vector<double> density;
};
[[nodiscard]] PowerSpectrum welch_psd(const SampledSignal& signal,
                                      double segment_s = kSnrSegmentSeconds);

}  // namespace hrm
