#pragma once

#include <string>

#include <json.hpp>

#include "hrm/detector.hpp"
#include "hrm/eval.hpp"

namespace hrm {

/// Keys: bpm (null when absent), valid, mode, n_edges, intervals,
/// saturation_warning.
[[nodiscard]] nlohmann::json to_json(const DetectionResult& result);

/// Keys: pairs, errors_pct, mean_pct, std_pct, failures.
[[nodiscard]] nlohmann::json to_json(const EvaluationReport& report);

/// `key = value` lines.
[[nodiscard]] std::string to_text_report(const DetectionResult& result);

/// Fixed-width table plus mean/std footer.
[[nodiscard]] std::string to_text_table(const EvaluationReport& report);

}  // namespace hrm
