#include "hrm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hrm {

void PipelineConfig::validate() const {
  pulse.validate();
  if (!(std::isfinite(duration_s) && duration_s > 0.0)) throw ValidationError("duration_s must be positive");
  if (!(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0)) {
    throw ValidationError("sample_rate_hz must be positive");
  }
  {
    OpticalPathSpec probe = optics;
    if (modulation_depth) probe.pulsatile_modulation_depth = *modulation_depth;
    probe.validate();
  }
  divider.validate();
  if (noise_enabled) {
    noise.validate();
    const double nyquist = 0.5 * sample_rate_hz;
    if (noise.mains_amplitude_v > 0.0 && noise.mains_hz >= nyquist) {
      throw ValidationError("mains_hz at or above Nyquist");
    }
    if (noise.ambient_amplitude_v > 0.0 && noise.ambient_flicker_hz >= nyquist) {
      throw ValidationError("ambient_flicker_hz at or above Nyquist");
    }
  }
  if (coefficients) {
    coefficients->validate();
    if (coefficients->sample_rate_hz != sample_rate_hz) {
      throw ValidationError("coefficients sample rate differs from sample_rate_hz");
    }
  } else {
    filter.validate(sample_rate_hz);
  }
  amplifier.validate();
  detector.validate();
  if (!(std::isfinite(settle_s) && settle_s >= 0.0)) throw ValidationError("settle_s must be nonnegative");
}

FilterCoefficients PipelineConfig::filter_coefficients() const {
  return coefficients ? *coefficients : design_bandpass(filter, sample_rate_hz);
}

SampledSignal synthesize_raw(const PipelineConfig& cfg) {
  cfg.validate();
  const SampledSignal beat = synthesize_ppg(cfg.pulse, cfg.duration_s, cfg.sample_rate_hz);
  OpticalPathSpec path = cfg.optics;
  path.pulsatile_modulation_depth =
      cfg.modulation_depth
          ? *cfg.modulation_depth
          : calibrate_modulation_depth(path, cfg.divider, cfg.pulse.peak_to_peak_mv * 1e-3);
  const SampledSignal emitted(cfg.sample_rate_hz,
                              std::vector<double>(beat.size(), cfg.optics.emitted_power));
  return ldr_to_voltage(apply_optical_path(emitted, path, &beat), cfg.divider);
}

SampledSignal inject_noise(const SampledSignal& raw, const PipelineConfig& cfg) {
  if (!cfg.noise_enabled) return raw;
  NoiseSpec noise = cfg.noise;
  noise.rng_seed = cfg.seed;
  return add_noise(raw, noise);
}

SampledSignal synthesize_sensor_signal(const PipelineConfig& cfg) {
  return inject_noise(synthesize_raw(cfg), cfg);
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  PipelineResult r;
  r.raw = synthesize_raw(cfg);
  r.noisy = inject_noise(r.raw, cfg);
  r.filtered = filter_signal(r.noisy, cfg.filter_coefficients());
  r.amplified = amplify(r.filtered, cfg.amplifier);
  r.detection = run_detector(r.amplified.signal, cfg.detector);
  return r;
}

SampledSignal trim_leading(const SampledSignal& signal, double seconds) {
  if (!(std::isfinite(seconds) && seconds >= 0.0)) throw ValidationError("trim must be nonnegative");
  const auto drop = std::min(signal.size(),
                             static_cast<std::size_t>(std::llround(seconds * signal.sample_rate_hz)));
  SampledSignal out;
  out.sample_rate_hz = signal.sample_rate_hz;
  out.t0_s = signal.time_at(drop);
  out.samples.assign(signal.samples.begin() + static_cast<std::ptrdiff_t>(drop), signal.samples.end());
  return out;
}

}  // namespace hrm
