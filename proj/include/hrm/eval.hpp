#pragma once

#include <span>
#include <string>
#include <vector>

#include "hrm/pipeline.hpp"

namespace hrm {

struct RatePair {
  double actual_bpm = 0.0;
  double measured_bpm = 0.0;

  void validate() const;
  friend bool operator==(const RatePair&, const RatePair&) = default;
};

enum class Denominator {
  kActual,    // E = 100 |A - M| / A
  kMeasured,  // E = 100 |A - M| / M, matches the printed ECG table column
};

[[nodiscard]] Denominator parse_denominator(std::string_view text);
[[nodiscard]] std::string_view to_string(Denominator d) noexcept;

[[nodiscard]] double error_rate(const RatePair& pair, Denominator d = Denominator::kActual);

struct ErrorReport {
  std::vector<double> per_pair_pct;
  double mean_pct = 0.0;
  /// Population standard deviation (divisor n).
  double std_pct = 0.0;
  std::size_t n = 0;
};

[[nodiscard]] ErrorReport summarize(std::span<const double> errors_pct);

struct EvaluationFailure {
  double true_bpm = 0.0;
  std::optional<double> measured_bpm;
  std::string reason;
};

struct EvaluationReport {
  std::vector<RatePair> pairs;
  ErrorReport errors;
  /// Cases whose detection was flagged invalid; excluded from `errors`.
  std::vector<EvaluationFailure> failures;
};

/// Runs the pipeline once per true rate with seed = base.seed + case index and
/// scores valid detections with error_rate.
[[nodiscard]] EvaluationReport evaluate_pipeline(std::span<const double> true_bpms,
                                                 const PipelineConfig& base,
                                                 Denominator d = Denominator::kActual);

struct ReferenceRow {
  std::string label;
  std::optional<RatePair> pair;
  double printed_error_pct = 0.0;
};

struct ReferenceDataset {
  std::string name;
  std::vector<ReferenceRow> rows;
};

/// ECG comparison (10 rows) and finger-size comparison (3 rows), as printed.
[[nodiscard]] std::vector<ReferenceDataset> load_reference_tables();
[[nodiscard]] const ReferenceDataset& reference_table(std::string_view name);

}  // namespace hrm
