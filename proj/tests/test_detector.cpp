#include "hrm/detector.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hrm/pipeline.hpp"
#include "test_support.hpp"

namespace hrm {
namespace {

DetectorState feed(DetectorState s, std::initializer_list<std::pair<double, double>> samples,
                   const DetectorConfig& cfg, std::vector<double>* fired = nullptr) {
  for (const auto& [t, v] : samples) {
    DetectorStep step = process_sample(std::move(s), t, v, cfg);
    if (fired && step.edge_t_s) fired->push_back(*step.edge_t_s);
    s = std::move(step.state);
  }
  return s;
}

TEST(ProcessSample, FiresOnArmedRisingCrossing) {
  DetectorConfig cfg;
  std::vector<double> fired;
  const DetectorState s = feed({}, {{0.0, 0.5}, {0.01, 1.0}, {0.02, 1.3}, {0.03, 1.5}}, cfg, &fired);
  EXPECT_EQ(fired, (std::vector<double>{0.02}));
  EXPECT_FALSE(s.armed);
  EXPECT_EQ(s.last_edge_t_s, 0.02);
}

TEST(ProcessSample, StartingAboveThresholdDoesNotFire) {
  DetectorConfig cfg;
  std::vector<double> fired;
  const DetectorState s = feed({}, {{0.0, 2.0}, {0.1, 2.5}}, cfg, &fired);
  EXPECT_TRUE(fired.empty());
  EXPECT_FALSE(s.armed);
}

TEST(ProcessSample, HysteresisRequiresDropBelowRearmLevel) {
  DetectorConfig cfg;  // threshold 1.2, re-arm at or below 1.0
  std::vector<double> fired;
  feed({}, {{0.0, 0.0}, {0.5, 1.3}, {1.0, 1.1}, {1.5, 1.3}, {2.0, 1.0}, {2.5, 1.3}}, cfg, &fired);
  EXPECT_EQ(fired, (std::vector<double>{0.5, 2.5}));
}

TEST(ProcessSample, RefractoryCrossingDisarmsWithoutFiring) {
  DetectorConfig cfg;
  std::vector<double> fired;
  const DetectorState s =
      feed({}, {{0.0, 0.0}, {1.0, 1.5}, {1.05, 0.0}, {1.1, 1.5}, {1.2, 1.5}, {1.3, 0.0}, {1.4, 1.5}},
           cfg, &fired);
  EXPECT_EQ(fired, (std::vector<double>{1.0, 1.4}));
  EXPECT_EQ(s.edge_times_s, fired);
}

TEST(ProcessSample, RejectsNonMonotoneTimeAndNonFiniteValues) {
  DetectorConfig cfg;
  const DetectorState s = feed({}, {{1.0, 0.0}}, cfg);
  EXPECT_THROW((void)process_sample(s, 1.0, 0.0, cfg), ValidationError);
  EXPECT_THROW((void)process_sample(s, 0.5, 0.0, cfg), ValidationError);
  EXPECT_THROW((void)process_sample(s, 2.0, std::nan(""), cfg), ValidationError);
}

TEST(BpmWindowCount, Examples) {
  const std::vector<double> six{0.5, 1.3, 2.1, 2.9, 3.7, 4.5};
  EXPECT_EQ(bpm_window_count(six, 5, 5.0), 72.0);
  std::vector<double> twelve;
  for (int i = 0; i < 12; ++i) twelve.push_back(0.4 + 0.8 * i);
  EXPECT_EQ(bpm_window_count(twelve, 10, 10.0), 72.0);
  EXPECT_EQ(bpm_window_count(std::vector<double>{}, 5, 5.0), 0.0);
}

TEST(BpmWindowCount, HalfOpenWindowAndShortStream) {
  const std::vector<double> edges{5.0, 6.0, 10.0};
  // (5, 10] excludes 5.0 and includes 10.0.
  EXPECT_EQ(bpm_window_count(edges, 5, 10.0), 24.0);
  EXPECT_EQ(bpm_window_count(edges, 5, 4.9), std::nullopt);
  EXPECT_EQ(bpm_window_count(edges, 5, 12.0, 8.0), std::nullopt);
  EXPECT_THROW((void)bpm_window_count(edges, 7, 10.0), ValidationError);
}

TEST(BpmWindowCountProperty, MultipleOfPerMinuteFactor) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> t(0.0, 30.0);
  std::uniform_int_distribution<int> count(0, 40);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> edges(static_cast<std::size_t>(count(rng)));
    for (double& e : edges) e = t(rng);
    std::sort(edges.begin(), edges.end());
    for (int w : {5, 10}) {
      const double end = 10.0 + t(rng) / 1.5;
      const auto bpm = bpm_window_count(edges, w, end);
      ASSERT_TRUE(bpm.has_value());
      const double per_minute = 60.0 / w;
      ASSERT_EQ(std::fmod(*bpm, per_minute), 0.0);
      const auto in_window = std::count_if(edges.begin(), edges.end(),
                                           [&](double e) { return e > end - w && e <= end; });
      ASSERT_EQ(*bpm, static_cast<double>(in_window) * per_minute);
    }
  }
}

TEST(BpmIntervalAverage, Examples) {
  const std::vector<double> edges{0.0, 0.8, 1.6, 2.4, 3.2, 4.0};
  EXPECT_NEAR(*bpm_interval_average(edges, 5), 75.0, 1e-9);
  EXPECT_EQ(bpm_interval_average(std::span(edges).first(5), 5), std::nullopt);
  const std::vector<double> mixed{0.0, 10.0, 11.0, 12.0};
  EXPECT_NEAR(*bpm_interval_average(mixed, 2), 60.0, 1e-12);
  EXPECT_THROW((void)bpm_interval_average(edges, 0), ValidationError);
}

SampledSignal square_pulses(double bpm, double seconds, double rate = 500.0) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  std::vector<double> v(n);
  const double period = 60.0 / bpm;
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = std::fmod(static_cast<double>(i) / rate, period) / period;
    v[i] = phase > 0.5 && phase < 0.7 ? 3.0 : 0.5;
  }
  return SampledSignal(rate, v);
}

TEST(RunDetector, CleanSquareTrain) {
  DetectorConfig cfg;
  const DetectionResult r = run_detector(square_pulses(72, 30), cfg);
  ASSERT_TRUE(r.bpm.has_value());
  EXPECT_NEAR(*r.bpm, 72.0, 0.1);
  EXPECT_TRUE(r.valid);
  EXPECT_EQ(r.edges_s.size(), 36u);
  EXPECT_EQ(r.intervals_s.size(), 35u);
  EXPECT_FALSE(r.saturation_warning);

  cfg.mode = DetectionMode::kWindowCount;
  const DetectionResult w = run_detector(square_pulses(72, 30), cfg);
  EXPECT_EQ(w.bpm, 72.0);
  EXPECT_EQ(w.mode, DetectionMode::kWindowCount);
}

TEST(RunDetector, DefaultPipelineAtMinus14Db) {
  PipelineConfig cfg;
  const PipelineResult r = run_pipeline(cfg);
  ASSERT_TRUE(r.detection.bpm.has_value());
  EXPECT_GE(*r.detection.bpm, 71.0);
  EXPECT_LE(*r.detection.bpm, 73.0);
  EXPECT_TRUE(r.detection.valid);

  cfg.detector.mode = DetectionMode::kWindowCount;
  cfg.detector.window_s = 5;
  const DetectionResult w = run_pipeline(cfg).detection;
  ASSERT_TRUE(w.bpm.has_value());
  EXPECT_TRUE(*w.bpm == 60.0 || *w.bpm == 72.0 || *w.bpm == 84.0) << *w.bpm;
}

TEST(RunDetector, FlatInputHasNoRate) {
  DetectorConfig cfg;
  const DetectionResult r = run_detector(SampledSignal(500.0, std::vector<double>(5000, 0.0)), cfg);
  EXPECT_FALSE(r.bpm.has_value());
  EXPECT_FALSE(r.valid);
  EXPECT_TRUE(r.edges_s.empty());
  EXPECT_TRUE(r.saturation_warning);  // 0 V sits on the low rail
}

TEST(RunDetector, RejectsEmptySignal) {
  SampledSignal empty;
  try {
    (void)run_detector(empty, DetectorConfig{});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "no samples");
  }
}

TEST(RunDetector, SlowRisingNoisyEdgeFiresOnce) {
  // A ramp through the threshold with ripple smaller than the hysteresis.
  DetectorConfig cfg;
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) v.push_back(1.0 + 0.4 * i / 1000.0 + 0.05 * std::sin(i * 0.9));
  const DetectionResult r = run_detector(SampledSignal(500.0, v), cfg);
  EXPECT_EQ(r.edges_s.size(), 1u);
}

TEST(PulseDetectorProperty, ChunkingDoesNotChangeResult) {
  PipelineConfig pc;
  pc.duration_s = 30;
  const SampledSignal x = run_pipeline(pc).amplified.signal;
  const DetectionResult batch = run_detector(x, pc.detector);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> chunk(1, 997);
  for (int trial = 0; trial < 5; ++trial) {
    PulseDetector d(pc.detector, x.sample_rate_hz, x.t0_s);
    std::size_t i = 0;
    while (i < x.size()) {
      const std::size_t k = std::min(chunk(rng), x.size() - i);
      d.push(std::span(x.samples).subspan(i, k));
      i += k;
    }
    EXPECT_EQ(d.result(), batch);
  }
}

TEST(RunDetectorProperty, Deterministic) {
  PipelineConfig pc;
  pc.duration_s = 20;
  const SampledSignal x = run_pipeline(pc).amplified.signal;
  EXPECT_EQ(run_detector(x, pc.detector), run_detector(x, pc.detector));
}

TEST(RunDetectorProperty, CleanAccuracyAcrossRange) {
  for (double bpm : {50.0, 60.0, 72.0, 90.0, 110.0, 125.0}) {
    PipelineConfig pc;
    pc.noise_enabled = false;
    pc.pulse.bpm = bpm;
    const DetectionResult r = run_pipeline(pc).detection;
    ASSERT_TRUE(r.bpm.has_value()) << bpm;
    EXPECT_NEAR(*r.bpm, bpm, 1.0) << bpm;
    EXPECT_TRUE(r.valid) << bpm;
  }
}

TEST(RunDetector, RangeLimits) {
  PipelineConfig pc;
  pc.pulse.bpm = 125;
  EXPECT_TRUE(run_pipeline(pc).detection.valid);
  pc.pulse.bpm = 150;
  const DetectionResult r = run_pipeline(pc).detection;
  EXPECT_FALSE(r.valid);
  ASSERT_TRUE(r.bpm.has_value());
  EXPECT_GT(*r.bpm, 125.0);
}

TEST(RunDetector, SaturationWarningAtHighGain) {
  PipelineConfig pc;
  pc.duration_s = 20;
  pc.amplifier.gain_db = 80;
  const PipelineResult r = run_pipeline(pc);
  EXPECT_GT(r.amplified.saturation_fraction, 0.5);
  EXPECT_TRUE(r.detection.saturation_warning);
}

TEST(DetectorConfig, Validation) {
  DetectorConfig cfg;
  cfg.window_s = 7;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.hysteresis_v = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.refractory_s = 1.0;  // longer than a 125 bpm period
  EXPECT_THROW(cfg.validate(), ValidationError);
  EXPECT_EQ(parse_detection_mode("window"), DetectionMode::kWindowCount);
  EXPECT_EQ(to_string(DetectionMode::kIntervalAverage), "interval_average");
  EXPECT_THROW((void)parse_detection_mode("peak"), ValidationError);
}

}  // namespace
}  // namespace hrm
