#include "hrm/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "hrm/dsp.hpp"

namespace hrm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite_in(double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; }

// Gaussian lobe with separate widths before and after its centre, wrapped
// onto the unit phase circle.
double wrapped_lobe(double phase, double centre, double sigma_rise, double sigma_decay) {
  double sum = 0.0;
  for (int shift = -2; shift <= 2; ++shift) {
    const double d = phase - centre + shift;
    const double sigma = d < 0.0 ? sigma_rise : sigma_decay;
    sum += std::exp(-0.5 * (d / sigma) * (d / sigma));
  }
  return sum;
}

double beat_value(const BeatShape& shape, double phase) {
  const double width = shape.systolic_width_fraction;
  switch (shape.family) {
    case BeatFamily::kRaisedCosine:
      return phase < width ? 0.5 * (1.0 - std::cos(kTwoPi * phase / width)) : 0.0;
    case BeatFamily::kTwoLobe: {
      const double systolic_peak = width / 3.0;
      double dicrotic_peak = systolic_peak + 0.45;
      dicrotic_peak -= std::floor(dicrotic_peak);
      return wrapped_lobe(phase, systolic_peak, width / 6.0, width / 3.0) +
             shape.dicrotic_fraction * wrapped_lobe(phase, dicrotic_peak, width / 6.0, width / 6.0);
    }
  }
  return 0.0;
}

// Standard normal deviates from the raw 64-bit engine output (Box-Muller).
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    // 53 random bits into (0, 1].
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = kTwoPi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

double variance(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double acc = 0.0;
  for (double v : x) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(x.size());
}

}  // namespace

void PulseTrainSpec::validate() const {
  if (!finite_in(bpm, 30.0, 220.0)) throw ValidationError("bpm out of range [30,220]");
  if (!(std::isfinite(beat_shape.systolic_width_fraction) &&
        beat_shape.systolic_width_fraction > 0.0 && beat_shape.systolic_width_fraction <= 1.0)) {
    throw ValidationError("systolic_width_fraction out of range (0,1]");
  }
  if (!(std::isfinite(beat_shape.dicrotic_fraction) && beat_shape.dicrotic_fraction >= 0.0 &&
        beat_shape.dicrotic_fraction < 1.0)) {
    throw ValidationError("dicrotic_fraction out of range [0,1)");
  }
  if (!(std::isfinite(peak_to_peak_mv) && peak_to_peak_mv > 0.0 && peak_to_peak_mv <= 10.0)) {
    throw ValidationError("peak_to_peak_mv out of range (0,10]");
  }
  if (!std::isfinite(phase_s)) throw ValidationError("phase_s must be finite");
}

void OpticalPathSpec::validate() const {
  if (!(std::isfinite(emitted_power) && emitted_power > 0.0)) {
    throw ValidationError("emitted_power must be positive");
  }
  if (!(std::isfinite(attenuation_fraction) && attenuation_fraction >= 0.0 &&
        attenuation_fraction < 1.0)) {
    throw ValidationError("attenuation_fraction out of range [0,1)");
  }
  if (!(std::isfinite(pulsatile_modulation_depth) && pulsatile_modulation_depth > 0.0 &&
        pulsatile_modulation_depth <= 1.0)) {
    throw ValidationError("pulsatile_modulation_depth out of range (0,1]");
  }
}

void DividerSpec::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) throw ValidationError(std::string(name) + " must be positive");
  };
  positive(supply_v, "supply_v");
  positive(fixed_resistance_ohm, "fixed_resistance_ohm");
  positive(r_dark_ohm, "r_dark_ohm");
  positive(r_bright_ohm, "r_bright_ohm");
  positive(power_scale, "power_scale");
  positive(gamma, "gamma");
  if (r_bright_ohm >= r_dark_ohm) throw ValidationError("r_bright_ohm must be below r_dark_ohm");
}

double DividerSpec::ldr_resistance(double received_power) const {
  return r_bright_ohm +
         (r_dark_ohm - r_bright_ohm) * std::pow(1.0 + received_power / power_scale, -gamma);
}

double DividerSpec::output_voltage(double received_power) const {
  const double r = ldr_resistance(received_power);
  return supply_v * fixed_resistance_ohm / (r + fixed_resistance_ohm);
}

void NoiseSpec::validate() const {
  auto nonnegative = [](double v, const char* name) {
    if (!(std::isfinite(v) && v >= 0.0)) throw ValidationError(std::string(name) + " must be nonnegative");
  };
  nonnegative(mains_amplitude_v, "mains_amplitude_v");
  nonnegative(ambient_amplitude_v, "ambient_amplitude_v");
  nonnegative(drift.amplitude_v, "drift_amplitude_v");
  nonnegative(white_noise_std_v, "white_noise_std_v");
  if (!(std::isfinite(mains_hz) && mains_hz > 0.0)) throw ValidationError("mains_hz must be positive");
  if (!(std::isfinite(ambient_flicker_hz) && ambient_flicker_hz > 0.0)) {
    throw ValidationError("ambient_flicker_hz must be positive");
  }
  if (!(std::isfinite(drift.frequency_hz) && drift.frequency_hz >= 0.0 && drift.frequency_hz < 0.3)) {
    throw ValidationError("drift_frequency_hz out of range [0,0.3)");
  }
  if (!std::isfinite(dc_offset_v)) throw ValidationError("dc_offset_v must be finite");
  if (target_snr_db && !std::isfinite(*target_snr_db)) {
    throw ValidationError("target_snr_db must be finite");
  }
}

bool NoiseSpec::is_identity() const noexcept {
  return mains_amplitude_v == 0.0 && ambient_amplitude_v == 0.0 && dc_offset_v == 0.0 &&
         drift.amplitude_v == 0.0 && white_noise_std_v == 0.0 && !target_snr_db;
}

NoiseSpec NoiseSpec::ambient_default() {
  NoiseSpec n;
  n.mains_amplitude_v = 0.02;
  n.ambient_amplitude_v = 0.03;
  n.drift = {0.004, 0.05};
  n.white_noise_std_v = 0.005;
  n.target_snr_db = -14.0;
  return n;
}

SampledSignal synthesize_ppg(const PulseTrainSpec& spec, double duration_s, double sample_rate_hz) {
  spec.validate();
  if (!(std::isfinite(duration_s) && duration_s > 0.0)) {
    throw ValidationError("duration_s must be positive");
  }
  if (!std::isfinite(sample_rate_hz) || sample_rate_hz < 50.0 * spec.bpm / 60.0) {
    throw ValidationError("sample_rate_hz below 50 samples per beat (undersampled)");
  }
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  if (n < 2) throw ValidationError("duration_s yields fewer than 2 samples");

  const double beat_hz = spec.bpm / 60.0;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double cycles = (static_cast<double>(i) / sample_rate_hz - spec.phase_s) * beat_hz;
    x[i] = beat_value(spec.beat_shape, cycles - std::floor(cycles));
  }

  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double span = *hi - *lo;
  if (!(span > 0.0)) throw ValidationError("beat waveform is flat at this sampling");
  const double scale = spec.peak_to_peak_mv * 1e-3 / span;
  for (double& v : x) v = (v - mean) * scale;
  return SampledSignal(sample_rate_hz, std::move(x));
}

SampledSignal apply_optical_path(const SampledSignal& emitted, const OpticalPathSpec& path,
                                 const SampledSignal* beat) {
  emitted.validate();
  path.validate();
  for (double p : emitted.samples) {
    if (p < 0.0) throw ValidationError("emitted power samples must be nonnegative");
  }

  std::vector<double> modulation(emitted.size(), 1.0);
  if (beat != nullptr) {
    beat->validate();
    if (beat->size() != emitted.size() || beat->sample_rate_hz != emitted.sample_rate_hz) {
      throw ValidationError("beat waveform must match the emitted signal length and rate");
    }
    if (!beat->empty()) {
      const auto [lo, hi] = std::minmax_element(beat->samples.begin(), beat->samples.end());
      const double span = *hi - *lo;
      for (std::size_t i = 0; i < modulation.size(); ++i) {
        const double b = span > 0.0 ? (beat->samples[i] - *lo) / span : 1.0;
        modulation[i] = 1.0 - path.pulsatile_modulation_depth * (1.0 - b);
      }
    }
  }

  const double transmission = 1.0 - path.attenuation_fraction;
  SampledSignal out = emitted;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.samples[i] = emitted.samples[i] * transmission * modulation[i];
  }
  return out;
}

SampledSignal ldr_to_voltage(const SampledSignal& received_power, const DividerSpec& divider) {
  received_power.validate();
  divider.validate();
  SampledSignal out = received_power;
  for (double& v : out.samples) {
    if (v < 0.0) throw ValidationError("received power samples must be nonnegative");
    v = divider.output_voltage(v);
  }
  return out;
}

double calibrate_modulation_depth(const OpticalPathSpec& path, const DividerSpec& divider,
                                  double target_swing_v) {
  OpticalPathSpec probe = path;
  probe.pulsatile_modulation_depth = 1.0;
  probe.validate();
  divider.validate();
  if (!(std::isfinite(target_swing_v) && target_swing_v > 0.0)) {
    throw ValidationError("target swing must be positive");
  }
  const double baseline = path.received_baseline_power();
  const double v_peak = divider.output_voltage(baseline);
  auto swing = [&](double depth) { return v_peak - divider.output_voltage(baseline * (1.0 - depth)); };
  if (swing(1.0) < target_swing_v) {
    throw ValidationError("divider cannot produce the requested swing");
  }
  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-16; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (swing(mid) < target_swing_v ? lo : hi) = mid;
  }
  return hi;
}

SampledSignal add_noise(const SampledSignal& clean, const NoiseSpec& noise) {
  clean.validate();
  noise.validate();
  const double nyquist = 0.5 * clean.sample_rate_hz;
  if (noise.mains_amplitude_v > 0.0 && noise.mains_hz >= nyquist) {
    throw ValidationError("mains_hz at or above Nyquist");
  }
  if (noise.ambient_amplitude_v > 0.0 && noise.ambient_flicker_hz >= nyquist) {
    throw ValidationError("ambient_flicker_hz at or above Nyquist");
  }
  if (noise.is_identity()) return clean;

  GaussianSource rng(noise.rng_seed);
  const double mains_phase = kTwoPi * rng.uniform();
  const double flicker_phase = kTwoPi * rng.uniform();
  const double drift_phase = kTwoPi * rng.uniform();

  std::vector<double> unit(clean.size());
  for (std::size_t i = 0; i < unit.size(); ++i) {
    const double t = clean.time_at(i);
    unit[i] = noise.mains_amplitude_v * std::sin(kTwoPi * noise.mains_hz * t + mains_phase) +
              noise.ambient_amplitude_v *
                  std::sin(kTwoPi * noise.ambient_flicker_hz * t + flicker_phase) +
              noise.drift.amplitude_v * std::sin(kTwoPi * noise.drift.frequency_hz * t + drift_phase) +
              noise.white_noise_std_v * rng.next();
  }

  auto compose = [&](double scale) {
    SampledSignal out = clean;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.samples[i] = clean.samples[i] + noise.dc_offset_v + scale * unit[i];
    }
    return out;
  };

  if (!noise.target_snr_db) return compose(1.0);

  const double target = *noise.target_snr_db;
  const double noise_var = variance(unit);
  if (!(noise_var > 0.0)) {
    throw ValidationError("target_snr_db unreachable: all noise amplitudes are zero");
  }
  const double clean_var = variance(clean.samples);
  if (!(clean_var > 0.0)) {
    throw ValidationError("target_snr_db unreachable: clean signal carries no power");
  }

  const BandSpec band;
  auto error_db = [&](double scale) { return estimate_snr(compose(scale), band) - target; };

  // Bracket the crossing in scale, then bisect geometrically.
  const double guess = std::sqrt(clean_var / noise_var * std::pow(10.0, -target / 10.0));
  double lo = guess;
  double hi = guess;
  int expansions = 0;
  while (error_db(lo) < 0.0) {
    lo *= 0.25;
    if (++expansions > 40) throw ValidationError("target_snr_db unreachable: above the clean-signal SNR");
  }
  expansions = 0;
  while (error_db(hi) > 0.0) {
    hi *= 4.0;
    if (++expansions > 40) throw ValidationError("target_snr_db unreachable: below the noise-only SNR");
  }
  double scale = std::sqrt(lo * hi);
  for (int iter = 0; iter < 100; ++iter) {
    scale = std::sqrt(lo * hi);
    const double e = error_db(scale);
    if (std::abs(e) < 1e-3) break;
    (e > 0.0 ? lo : hi) = scale;
  }
  return compose(scale);
}

}  // namespace hrm
