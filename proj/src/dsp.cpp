#include "hrm/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <unsupported/Eigen/FFT>

namespace hrm {

namespace {

constexpr double kMagnitudeFloor = 1e-20;

std::complex<double> section_response(const Biquad& s, std::complex<double> z_inv) {
  const auto z_inv2 = z_inv * z_inv;
  return (s.b0 + s.b1 * z_inv + s.b2 * z_inv2) / (1.0 + s.a1 * z_inv + s.a2 * z_inv2);
}

std::complex<double> cascade_response(const FilterCoefficients& c, double freq_hz) {
  const double omega = 2.0 * std::numbers::pi * freq_hz / c.sample_rate_hz;
  const std::complex<double> z_inv = std::polar(1.0, -omega);
  std::complex<double> h{1.0, 0.0};
  for (const Biquad& s : c.sections) h *= section_response(s, z_inv);
  return h;
}

enum class Edge { kLowPass, kHighPass };

// Butterworth edge of the given order as bilinear-transformed sections.
void append_edge(std::vector<Biquad>& out, Edge edge, int order, double corner_hz,
                 double sample_rate_hz) {
  const double k = std::tan(std::numbers::pi * corner_hz / sample_rate_hz);
  for (int i = 1; i <= order / 2; ++i) {
    const double q = 1.0 / (2.0 * std::sin(std::numbers::pi * (2.0 * i - 1.0) / (2.0 * order)));
    const double norm = 1.0 / (1.0 + k / q + k * k);
    Biquad s;
    if (edge == Edge::kLowPass) {
      s.b0 = k * k * norm;
      s.b1 = 2.0 * s.b0;
      s.b2 = s.b0;
    } else {
      s.b0 = norm;
      s.b1 = -2.0 * norm;
      s.b2 = norm;
    }
    s.a1 = 2.0 * (k * k - 1.0) * norm;
    s.a2 = (1.0 - k / q + k * k) * norm;
    out.push_back(s);
  }
  if (order % 2 == 1) {
    Biquad s;
    if (edge == Edge::kLowPass) {
      s.b0 = k / (k + 1.0);
      s.b1 = s.b0;
    } else {
      s.b0 = 1.0 / (k + 1.0);
      s.b1 = -s.b0;
    }
    s.a1 = (k - 1.0) / (k + 1.0);
    out.push_back(s);
  }
}

}  // namespace

void FilterSpec::validate(double sample_rate_hz) const {
  if (!(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0)) {
    throw ValidationError("sample_rate_hz must be positive");
  }
  if (order_per_edge < 1) throw ValidationError("order_per_edge must be >= 1");
  if (order_per_edge > 8) throw ValidationError("order_per_edge must be <= 8");
  if (!(std::isfinite(low_cutoff_hz) && low_cutoff_hz > 0.0)) {
    throw ValidationError("low_cutoff_hz must be positive");
  }
  if (!(std::isfinite(high_cutoff_hz) && high_cutoff_hz > low_cutoff_hz)) {
    throw ValidationError("high_cutoff_hz must exceed low_cutoff_hz");
  }
  if (high_cutoff_hz >= 0.5 * sample_rate_hz) throw ValidationError("cutoff above Nyquist");
}

bool Biquad::is_stable() const noexcept {
  return std::isfinite(a1) && std::isfinite(a2) && std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2;
}

void FilterCoefficients::validate() const {
  if (!(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0)) {
    throw ValidationError("coefficients.sample_rate_hz must be positive");
  }
  if (sections.empty()) throw ValidationError("coefficients: no sections");
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const Biquad& s = sections[i];
    if (!(std::isfinite(s.b0) && std::isfinite(s.b1) && std::isfinite(s.b2))) {
      throw ValidationError("coefficients: section" + std::to_string(i) + " is not finite");
    }
    if (!s.is_stable()) {
      throw ValidationError("coefficients: section" + std::to_string(i) + " is unstable");
    }
  }
}

void AmplifierSpec::validate() const {
  if (!std::isfinite(gain_db)) throw ValidationError("gain_db must be finite");
  if (!(std::isfinite(rail_low_v) && std::isfinite(rail_high_v) && std::isfinite(offset_v))) {
    throw ValidationError("amplifier rails and offset must be finite");
  }
  if (!(rail_low_v < offset_v && offset_v < rail_high_v)) {
    throw ValidationError("offset_v must lie strictly between rail_low_v and rail_high_v");
  }
}

double AmplifierSpec::linear_gain() const noexcept { return std::pow(10.0, gain_db / 20.0); }

void BandSpec::validate() const {
  if (!(std::isfinite(f_low_hz) && std::isfinite(f_high_hz) && f_low_hz > 0.0 &&
        f_low_hz < f_high_hz)) {
    throw ValidationError("band must satisfy 0 < f_low_hz < f_high_hz");
  }
}

FilterCoefficients design_bandpass(const FilterSpec& spec, double sample_rate_hz) {
  spec.validate(sample_rate_hz);
  FilterCoefficients c;
  c.sample_rate_hz = sample_rate_hz;
  append_edge(c.sections, Edge::kHighPass, spec.order_per_edge, spec.low_cutoff_hz, sample_rate_hz);
  append_edge(c.sections, Edge::kLowPass, spec.order_per_edge, spec.high_cutoff_hz, sample_rate_hz);

  const double centre = std::sqrt(spec.low_cutoff_hz * spec.high_cutoff_hz);
  const double gain = std::abs(cascade_response(c, centre));
  Biquad& first = c.sections.front();
  first.b0 /= gain;
  first.b1 /= gain;
  first.b2 /= gain;
  return c;
}

SampledSignal filter_signal(const SampledSignal& signal, const FilterCoefficients& coeffs) {
  signal.validate();
  coeffs.validate();
  if (signal.sample_rate_hz != coeffs.sample_rate_hz) {
    throw ValidationError("sample-rate mismatch between signal and filter");
  }
  SampledSignal out = signal;
  for (const Biquad& s : coeffs.sections) {
    double z1 = 0.0;
    double z2 = 0.0;
    for (double& v : out.samples) {
      const double x = v;
      const double y = s.b0 * x + z1;
      z1 = s.b1 * x - s.a1 * y + z2;
      z2 = s.b2 * x - s.a2 * y;
      v = y;
    }
  }
  return out;
}

AmplifiedSignal amplify(const SampledSignal& signal, const AmplifierSpec& amp) {
  signal.validate();
  amp.validate();
  const double gain = amp.linear_gain();
  AmplifiedSignal out{signal, 0.0};
  std::size_t clipped = 0;
  for (double& v : out.signal.samples) {
    const double raw = amp.offset_v + gain * v;
    if (raw < amp.rail_low_v || raw > amp.rail_high_v) ++clipped;
    v = std::clamp(raw, amp.rail_low_v, amp.rail_high_v);
  }
  if (!signal.empty()) {
    out.saturation_fraction = static_cast<double>(clipped) / static_cast<double>(signal.size());
  }
  return out;
}

std::vector<double> frequency_response(const FilterCoefficients& coeffs,
                                       std::span<const double> freqs_hz) {
  coeffs.validate();
  const double nyquist = 0.5 * coeffs.sample_rate_hz;
  std::vector<double> out;
  out.reserve(freqs_hz.size());
  for (double f : freqs_hz) {
    if (!(std::isfinite(f) && f >= 0.0 && f <= nyquist)) {
      throw ValidationError("frequency " + std::to_string(f) + " Hz outside [0, Nyquist]");
    }
    const double mag = std::abs(cascade_response(coeffs, f));
    out.push_back(20.0 * std::log10(std::max(mag, kMagnitudeFloor)));
  }
  return out;
}

PowerSpectrum welch_psd(const SampledSignal& signal, double segment_s) {
  signal.validate();
  const auto seg = static_cast<std::size_t>(std::llround(segment_s * signal.sample_rate_hz));
  if (seg < 4 || signal.size() < seg) {
    throw ValidationError("signal shorter than the " + std::to_string(segment_s) +
                          " s spectral segment");
  }
  const std::size_t step = seg / 2;

  std::vector<double> window(seg);
  double window_power = 0.0;
  for (std::size_t k = 0; k < seg; ++k) {
    window[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                      static_cast<double>(seg)));
    window_power += window[k] * window[k];
  }

  const double mean = std::accumulate(signal.samples.begin(), signal.samples.end(), 0.0) /
                      static_cast<double>(signal.size());

  const std::size_t n_bins = seg / 2 + 1;
  PowerSpectrum psd;
  psd.bin_hz = signal.sample_rate_hz / static_cast<double>(seg);
  psd.density.assign(n_bins, 0.0);

  Eigen::FFT<double> fft;
  std::vector<double> frame(seg);
  std::vector<std::complex<double>> spectrum;
  std::size_t n_segments = 0;
  for (std::size_t start = 0; start + seg <= signal.size(); start += step) {
    for (std::size_t k = 0; k < seg; ++k) {
      frame[k] = (signal.samples[start + k] - mean) * window[k];
    }
    fft.fwd(spectrum, frame);
    for (std::size_t k = 0; k < n_bins; ++k) psd.density[k] += std::norm(spectrum[k]);
    ++n_segments;
  }

  const double scale = 1.0 / (signal.sample_rate_hz * window_power * static_cast<double>(n_segments));
  for (std::size_t k = 0; k < n_bins; ++k) {
    const bool unpaired = k == 0 || (seg % 2 == 0 && k == n_bins - 1);
    psd.density[k] *= unpaired ? scale : 2.0 * scale;
  }
  return psd;
}

double estimate_snr(const SampledSignal& signal, const BandSpec& band) {
  band.validate();
  if (band.f_high_hz >= 0.5 * signal.sample_rate_hz) {
    throw ValidationError("band extends past Nyquist");
  }
  const PowerSpectrum psd = welch_psd(signal, kSnrSegmentSeconds);

  double in_band = 0.0;
  double out_band = 0.0;
  std::size_t in_bins = 0;
  // Tolerance keeps bins that sit exactly on an edge inside the band.
  const double tol = 1e-9 * psd.bin_hz;
  for (std::size_t k = 1; k < psd.density.size(); ++k) {
    const double f = static_cast<double>(k) * psd.bin_hz;
    if (f >= band.f_low_hz - tol && f <= band.f_high_hz + tol) {
      in_band += psd.density[k];
      ++in_bins;
    } else {
      out_band += psd.density[k];
    }
  }
  if (in_bins == 0) throw ValidationError("band contains no spectral bins");
  if (in_band == 0.0 && out_band == 0.0) throw ValidationError("signal has no power outside DC");
  if (out_band == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(in_band / out_band);
}

}  // namespace hrm
