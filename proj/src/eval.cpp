#include "hrm/eval.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace hrm {

void RatePair::validate() const {
  if (!(std::isfinite(actual_bpm) && actual_bpm > 0.0)) throw ValidationError("actual_bpm must be positive");
  if (!(std::isfinite(measured_bpm) && measured_bpm > 0.0)) {
    throw ValidationError("measured_bpm must be positive");
  }
}

Denominator parse_denominator(std::string_view text) {
  if (text == "actual" || text == "A") return Denominator::kActual;
  if (text == "measured" || text == "M") return Denominator::kMeasured;
  throw ValidationError("unknown denominator '" + std::string(text) + "' (expected actual|measured)");
}

std::string_view to_string(Denominator d) noexcept {
  return d == Denominator::kActual ? "actual" : "measured";
}

double error_rate(const RatePair& pair, Denominator d) {
  pair.validate();
  const double base = d == Denominator::kActual ? pair.actual_bpm : pair.measured_bpm;
  return 100.0 * std::abs(pair.actual_bpm - pair.measured_bpm) / base;
}

ErrorReport summarize(std::span<const double> errors_pct) {
  if (errors_pct.empty()) throw ValidationError("cannot summarize an empty error list");
  ErrorReport r;
  r.per_pair_pct.assign(errors_pct.begin(), errors_pct.end());
  r.n = errors_pct.size();
  const auto n = static_cast<double>(r.n);
  r.mean_pct = std::accumulate(errors_pct.begin(), errors_pct.end(), 0.0) / n;
  double ss = 0.0;
  for (double e : errors_pct) ss += (e - r.mean_pct) * (e - r.mean_pct);
  r.std_pct = std::sqrt(ss / n);
  return r;
}

EvaluationReport evaluate_pipeline(std::span<const double> true_bpms, const PipelineConfig& base,
                                   Denominator d) {
  if (true_bpms.empty()) throw ValidationError("no heart rates to evaluate");
  for (double bpm : true_bpms) {
    if (!(bpm >= base.detector.min_bpm && bpm <= base.detector.max_bpm)) {
      throw ValidationError("true bpm " + std::to_string(bpm) + " outside the detector range");
    }
  }

  EvaluationReport report;
  std::vector<double> errors;
  for (std::size_t i = 0; i < true_bpms.size(); ++i) {
    PipelineConfig cfg = base;
    cfg.pulse.bpm = true_bpms[i];
    cfg.seed = base.seed + i;
    const DetectionResult det = run_pipeline(cfg).detection;
    if (!det.valid) {
      report.failures.push_back({true_bpms[i], det.bpm,
                                 det.bpm ? "measured rate outside the valid range" : "no reading"});
      continue;
    }
    const RatePair pair{true_bpms[i], *det.bpm};
    report.pairs.push_back(pair);
    errors.push_back(error_rate(pair, d));
  }
  if (!errors.empty()) report.errors = summarize(errors);
  return report;
}

namespace {

std::vector<ReferenceDataset> build_tables() {
  ReferenceDataset ecg{"table1", {}};
  const struct {
    double ecg, hrm, printed;
  } rows[] = {{76, 78, 2.56}, {78, 78, 0},    {76, 72, 5.56}, {82, 84, 2.38}, {83, 84, 1.19},
              {85, 90, 5.56}, {77, 84, 8.33}, {79, 84, 5.95}, {89, 96, 7.29}, {88, 90, 2.22}};
  for (const auto& r : rows) {
    ecg.rows.push_back({"", RatePair{r.ecg, r.hrm}, r.printed});
  }
  ReferenceDataset finger{"table2",
                          {{"Big Finger (3.0\")", std::nullopt, 15.67},
                           {"Medium Finger (2.5\")", std::nullopt, 4.31},
                           {"Small Finger (2.125\")", std::nullopt, 8.91}}};
  return {ecg, finger};
}

}  // namespace

std::vector<ReferenceDataset> load_reference_tables() { return build_tables(); }

const ReferenceDataset& reference_table(std::string_view name) {
  static const std::vector<ReferenceDataset> tables = build_tables();
  for (const auto& t : tables) {
    if (t.name == name) return t;
  }
  throw ValidationError("unknown table '" + std::string(name) + "'");
}

}  // namespace hrm
