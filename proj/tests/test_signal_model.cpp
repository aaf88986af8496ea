#include "hrm/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "hrm/dsp.hpp"
#include "hrm/pipeline.hpp"
#include "test_support.hpp"

namespace hrm {
namespace {

using testing::tone_amplitude;

double span_of(const std::vector<double>& x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Dominant non-DC frequency on the grid k * step (default 1 / duration), by
// brute-force DFT.
double dominant_frequency(const SampledSignal& s, double max_hz, double step_hz = 0.0) {
  const double resolution = step_hz > 0.0 ? step_hz : 1.0 / s.duration_s();
  double best_f = 0.0;
  double best_a = -1.0;
  for (int k = 1; k * resolution <= max_hz; ++k) {
    const double f = k * resolution;
    const double a = tone_amplitude(s.samples, s.sample_rate_hz, f);
    if (a > best_a) {
      best_a = a;
      best_f = f;
    }
  }
  return best_f;
}

std::size_t rising_midpoint_crossings(const std::vector<double>& x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double mid = 0.5 * (*lo + *hi);
  std::size_t n = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i - 1] < mid && x[i] >= mid) ++n;
  }
  return n;
}

TEST(SynthesizePpg, LengthAndFundamentalAt75Bpm) {
  PulseTrainSpec spec;
  spec.bpm = 75;
  for (BeatFamily family : {BeatFamily::kTwoLobe, BeatFamily::kRaisedCosine}) {
    spec.beat_shape.family = family;
    const SampledSignal s = synthesize_ppg(spec, 10.0, 100.0);
    EXPECT_EQ(s.size(), 1000u);
    // 12.5 beats in the window, so search a half-bin grid.
    EXPECT_NEAR(dominant_frequency(s, 10.0, 0.05), 1.25, 1e-9);
  }
}

TEST(SynthesizePpg, SeventyTwoBeatsPerMinuteWithTenMillivoltSwing) {
  PulseTrainSpec spec;
  spec.bpm = 72;
  spec.peak_to_peak_mv = 10;
  const SampledSignal s = synthesize_ppg(spec, 60.0, 500.0);
  EXPECT_EQ(s.size(), 30000u);
  EXPECT_EQ(rising_midpoint_crossings(s.samples), 72u);
  EXPECT_NEAR(span_of(s.samples), 0.010, 0.010 * 0.01);
  EXPECT_NEAR(mean_of(s.samples), 0.0, 1e-15);
}

TEST(SynthesizePpg, FundamentalAt125BpmSitsInsideThePassband) {
  PulseTrainSpec spec;
  spec.bpm = 125;
  const SampledSignal s = synthesize_ppg(spec, 12.0, 500.0);
  const double f0 = dominant_frequency(s, 10.0);
  EXPECT_NEAR(f0, 125.0 / 60.0, 1e-9);
  EXPECT_LT(f0, 2.5);
  const FilterCoefficients bp = design_bandpass(FilterSpec{}, 500.0);
  const double f = 125.0 / 60.0;
  EXPECT_GT(frequency_response(bp, std::span(&f, 1))[0], -3.0);
}

TEST(SynthesizePpg, SpectralPeakAtBeatRateAcrossPhysiologicalRange) {
  // 30 s windows put every even bpm on an exact DFT bin.
  for (BeatFamily family : {BeatFamily::kTwoLobe, BeatFamily::kRaisedCosine}) {
    for (int bpm = 40; bpm <= 180; bpm += 10) {
      PulseTrainSpec spec;
      spec.bpm = bpm;
      spec.beat_shape.family = family;
      const SampledSignal s = synthesize_ppg(spec, 30.0, 200.0);
      EXPECT_NEAR(dominant_frequency(s, 12.0), bpm / 60.0, 1e-9) << "bpm " << bpm;
    }
  }
}

TEST(SynthesizePpg, PeriodicWithBeatPeriod) {
  PulseTrainSpec spec;
  spec.bpm = 60;  // 500 samples per beat at 500 Hz
  const SampledSignal s = synthesize_ppg(spec, 10.0, 500.0);
  for (std::size_t i = 0; i + 500 < s.size(); ++i) {
    ASSERT_NEAR(s.samples[i], s.samples[i + 500], 1e-15);
  }
}

TEST(SynthesizePpg, RejectsOutOfRangeFields) {
  PulseTrainSpec spec;
  spec.bpm = 0;
  EXPECT_THROW((void)synthesize_ppg(spec, 10, 500), ValidationError);
  spec.bpm = 221;
  EXPECT_THROW((void)synthesize_ppg(spec, 10, 500), ValidationError);
  spec.bpm = std::nan("");
  EXPECT_THROW((void)synthesize_ppg(spec, 10, 500), ValidationError);
  spec = {};
  spec.peak_to_peak_mv = 10.5;
  EXPECT_THROW((void)synthesize_ppg(spec, 10, 500), ValidationError);
  spec.peak_to_peak_mv = 0;
  EXPECT_THROW((void)synthesize_ppg(spec, 10, 500), ValidationError);
  spec = {};
  spec.beat_shape.systolic_width_fraction = 0;
  EXPECT_THROW((void)synthesize_ppg(spec, 10, 500), ValidationError);
  spec = {};
  spec.beat_shape.dicrotic_fraction = 1.0;
  EXPECT_THROW((void)synthesize_ppg(spec, 10, 500), ValidationError);
  spec = {};
  EXPECT_THROW((void)synthesize_ppg(spec, 0.0, 500), ValidationError);
}

TEST(SynthesizePpg, RejectsUndersampling) {
  PulseTrainSpec spec;
  spec.bpm = 72;  // needs >= 60 Hz
  EXPECT_THROW((void)synthesize_ppg(spec, 10, 59.9), ValidationError);
  EXPECT_NO_THROW((void)synthesize_ppg(spec, 10, 60.0));
}

TEST(SynthesizePpg, BpmErrorMessageNamesTheRange) {
  PulseTrainSpec spec;
  spec.bpm = 0;
  try {
    (void)synthesize_ppg(spec, 10, 500);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("bpm out of range [30,220]"), std::string::npos);
  }
}

SampledSignal constant(double value, std::size_t n = 100, double rate = 100.0) {
  return SampledSignal(rate, std::vector<double>(n, value));
}

TEST(OpticalPath, AttenuationExamples) {
  OpticalPathSpec path;
  path.attenuation_fraction = 0.8;
  for (double v : apply_optical_path(constant(1.0), path).samples) EXPECT_NEAR(v, 0.2, 1e-15);
  path.attenuation_fraction = 0.0;
  for (double v : apply_optical_path(constant(1.0), path).samples) EXPECT_EQ(v, 1.0);
  path.attenuation_fraction = 0.5;
  for (double v : apply_optical_path(constant(2.0), path).samples) EXPECT_EQ(v, 1.0);
  EXPECT_NEAR(path.received_baseline_power(), 0.5, 1e-15);
}

TEST(OpticalPath, BeatModulatesReceivedPower) {
  OpticalPathSpec path;
  path.pulsatile_modulation_depth = 0.1;
  PulseTrainSpec spec;
  const SampledSignal beat = synthesize_ppg(spec, 5.0, 100.0);
  const SampledSignal out = apply_optical_path(constant(1.0, beat.size()), path, &beat);
  const auto [lo, hi] = std::minmax_element(out.samples.begin(), out.samples.end());
  EXPECT_NEAR(*hi, 0.2, 1e-15);
  EXPECT_NEAR(*lo, 0.2 * 0.9, 1e-15);
  for (double v : out.samples) EXPECT_GE(v, 0.0);
}

TEST(OpticalPath, RejectsInvalidInput) {
  OpticalPathSpec path;
  EXPECT_THROW((void)apply_optical_path(constant(-0.1), path), ValidationError);
  path.attenuation_fraction = 1.0;
  EXPECT_THROW((void)apply_optical_path(constant(1.0), path), ValidationError);
  path.attenuation_fraction = -0.1;
  EXPECT_THROW((void)apply_optical_path(constant(1.0), path), ValidationError);
}

TEST(LdrToVoltage, SymmetricDividerGivesHalfSupply) {
  DividerSpec d;
  // Invert r(p) = r_b + (r_d - r_b)(1 + p/s)^-g for r(p) = fixed.
  const double ratio = (d.fixed_resistance_ohm - d.r_bright_ohm) / (d.r_dark_ohm - d.r_bright_ohm);
  const double p = d.power_scale * (std::pow(ratio, -1.0 / d.gamma) - 1.0);
  EXPECT_NEAR(d.ldr_resistance(p), d.fixed_resistance_ohm, 1e-6);
  const SampledSignal v = ldr_to_voltage(constant(p, 3), d);
  for (double x : v.samples) EXPECT_NEAR(x, 2.5, 1e-12);
}

TEST(LdrToVoltage, DarkLimitTendsToZero) {
  DividerSpec d;
  d.r_dark_ohm = 1e10;
  d.fixed_resistance_ohm = 1e3;
  const SampledSignal v = ldr_to_voltage(constant(0.0, 3), d);
  for (double x : v.samples) EXPECT_LT(x, 1e-3);
}

TEST(LdrToVoltage, OutputBoundedBySupply) {
  DividerSpec d;
  for (double p : {0.0, 1e-6, 0.2, 10.0, 1e9}) {
    const double v = d.output_voltage(p);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, d.supply_v);
  }
}

TEST(LdrToVoltage, RejectsNonpositiveResistances) {
  DividerSpec d;
  d.fixed_resistance_ohm = 0;
  EXPECT_THROW((void)ldr_to_voltage(constant(0.2), d), ValidationError);
  d = {};
  d.r_dark_ohm = -1;
  EXPECT_THROW((void)ldr_to_voltage(constant(0.2), d), ValidationError);
  d = {};
  EXPECT_THROW((void)ldr_to_voltage(constant(-0.2), d), ValidationError);
}

TEST(LdrToVoltage, DefaultCalibrationGivesTenMillivoltSwing) {
  PipelineConfig cfg;
  cfg.noise_enabled = false;
  cfg.duration_s = 10;
  const SampledSignal raw = synthesize_raw(cfg);
  EXPECT_NEAR(span_of(raw.samples), 0.010, 0.010 * 0.01);
  // Baseline sits well inside the supply.
  EXPECT_GT(mean_of(raw.samples), 1.0);
  EXPECT_LT(mean_of(raw.samples), 4.0);
}

TEST(OpticsProperty, MonotoneInReceivedPower) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> power(0.0, 5.0);
  DividerSpec d;
  OpticalPathSpec path;
  for (int trial = 0; trial < 500; ++trial) {
    const double a = power(rng);
    const double b = a + power(rng);
    const SampledSignal in(100.0, {a, b});
    const SampledSignal received = apply_optical_path(in, path);
    ASSERT_LE(received.samples[0], received.samples[1]);
    const SampledSignal v = ldr_to_voltage(received, d);
    ASSERT_LE(v.samples[0], v.samples[1]);
    ASSERT_GT(d.ldr_resistance(a), d.ldr_resistance(b + 1e-3));
  }
}

TEST(CalibrateModulationDepth, HitsRequestedSwing) {
  OpticalPathSpec path;
  DividerSpec d;
  for (double swing : {1e-4, 1e-3, 1e-2, 0.1}) {
    const double depth = calibrate_modulation_depth(path, d, swing);
    const double p0 = path.received_baseline_power();
    EXPECT_NEAR(d.output_voltage(p0) - d.output_voltage(p0 * (1 - depth)), swing, swing * 1e-9);
  }
  EXPECT_THROW((void)calibrate_modulation_depth(path, d, 10.0), ValidationError);
}

SampledSignal clean_beat(double bpm = 72, double duration = 60, BeatShape shape = {}) {
  PulseTrainSpec spec;
  spec.bpm = bpm;
  spec.beat_shape = shape;
  return synthesize_ppg(spec, duration, 500.0);
}

TEST(AddNoise, AllZeroSpecIsIdentity) {
  const SampledSignal s = clean_beat(72, 10);
  EXPECT_EQ(add_noise(s, NoiseSpec{}), s);
}

TEST(AddNoise, HitsMinus14DbWithMainsAndFlicker) {
  NoiseSpec n;
  n.mains_amplitude_v = 0.02;
  n.ambient_amplitude_v = 0.03;
  n.target_snr_db = -14.0;
  n.rng_seed = 3;
  const SampledSignal noisy = add_noise(clean_beat(), n);
  EXPECT_NEAR(estimate_snr(noisy), -14.0, 0.5);
}

TEST(AddNoise, DeterministicForFixedSeed) {
  NoiseSpec n = NoiseSpec::ambient_default();
  n.rng_seed = 42;
  const SampledSignal s = clean_beat(72, 20);
  const SampledSignal a = add_noise(s, n);
  const SampledSignal b = add_noise(s, n);
  EXPECT_EQ(a.samples, b.samples);
  n.rng_seed = 43;
  EXPECT_NE(add_noise(s, n).samples, a.samples);
}

TEST(AddNoise, UnscaledComponentsAddExactly) {
  NoiseSpec n;
  n.dc_offset_v = 0.25;
  const SampledSignal s = clean_beat(72, 5);
  const SampledSignal out = add_noise(s, n);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(out.samples[i], s.samples[i] + 0.25);

  NoiseSpec mains;
  mains.mains_amplitude_v = 0.5;
  const SampledSignal hum = add_noise(SampledSignal(500.0, std::vector<double>(5000, 0.0)), mains);
  EXPECT_NEAR(tone_amplitude(hum.samples, 500.0, 60.0), 0.5, 1e-9);
}

TEST(AddNoise, RejectsComponentsAboveNyquist) {
  NoiseSpec n;
  n.ambient_amplitude_v = 0.01;  // 120 Hz flicker
  const SampledSignal slow = synthesize_ppg(PulseTrainSpec{}, 10.0, 200.0);
  EXPECT_THROW((void)add_noise(slow, n), ValidationError);
  n = {};
  n.mains_amplitude_v = 0.01;
  n.mains_hz = 300;
  EXPECT_THROW((void)add_noise(clean_beat(72, 10), n), ValidationError);
}

TEST(AddNoise, RejectsUnreachableTargets) {
  NoiseSpec n;
  n.target_snr_db = -14.0;  // every amplitude zero
  EXPECT_THROW((void)add_noise(clean_beat(72, 10), n), ValidationError);

  NoiseSpec loud = NoiseSpec::ambient_default();
  loud.target_snr_db = 60.0;  // the beat's own harmonics cap its SNR near 23 dB
  EXPECT_THROW((void)add_noise(clean_beat(72, 20), loud), ValidationError);
}

TEST(AddNoise, RejectsInvalidSpec) {
  NoiseSpec n;
  n.white_noise_std_v = -1;
  EXPECT_THROW((void)add_noise(clean_beat(72, 5), n), ValidationError);
  n = {};
  n.drift = {0.01, 0.5};
  EXPECT_THROW((void)add_noise(clean_beat(72, 5), n), ValidationError);
}

TEST(AddNoiseProperty, TargetSnrSelfConsistentFromMinus20To20) {
  // A pure in-band tone reaches the whole target range.
  BeatShape sinusoid{BeatFamily::kRaisedCosine, 1.0, 0.0};
  const SampledSignal s = clean_beat(72, 30, sinusoid);
  NoiseSpec n = NoiseSpec::ambient_default();
  for (int target = -20; target <= 20; target += 4) {
    n.target_snr_db = target;
    n.rng_seed = static_cast<std::uint64_t>(target + 100);
    EXPECT_NEAR(estimate_snr(add_noise(s, n)), target, 0.5) << "target " << target;
  }
}

TEST(AddNoiseProperty, TargetSnrSelfConsistentForDefaultBeat) {
  const SampledSignal s = clean_beat(72, 30);
  NoiseSpec n = NoiseSpec::ambient_default();
  for (int target = -20; target <= 10; target += 5) {
    n.target_snr_db = target;
    EXPECT_NEAR(estimate_snr(add_noise(s, n)), target, 0.5) << "target " << target;
  }
}

}  // namespace
}  // namespace hrm
