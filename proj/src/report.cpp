#include "hrm/report.hpp"

#include <cstdio>
#include <sstream>

namespace hrm {

nlohmann::json to_json(const DetectionResult& result) {
  nlohmann::json j;
  j["bpm"] = result.bpm ? nlohmann::json(*result.bpm) : nlohmann::json(nullptr);
  j["valid"] = result.valid;
  j["mode"] = std::string(to_string(result.mode));
  j["n_edges"] = result.edges_s.size();
  j["intervals"] = result.intervals_s;
  j["saturation_warning"] = result.saturation_warning;
  return j;
}

nlohmann::json to_json(const EvaluationReport& report) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const RatePair& p : report.pairs) {
    pairs.push_back({{"actual_bpm", p.actual_bpm}, {"measured_bpm", p.measured_bpm}});
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const EvaluationFailure& f : report.failures) {
    failures.push_back({{"true_bpm", f.true_bpm},
                        {"measured_bpm", f.measured_bpm ? nlohmann::json(*f.measured_bpm)
                                                        : nlohmann::json(nullptr)},
                        {"reason", f.reason}});
  }
  nlohmann::json j;
  j["pairs"] = pairs;
  j["errors_pct"] = report.errors.per_pair_pct;
  j["mean_pct"] = report.errors.mean_pct;
  j["std_pct"] = report.errors.std_pct;
  j["failures"] = failures;
  return j;
}

std::string to_text_report(const DetectionResult& result) {
  std::ostringstream out;
  out << "bpm = ";
  if (result.bpm) {
    out << *result.bpm;
  } else {
    out << "none";
  }
  out << "\nvalid = " << (result.valid ? "true" : "false") << "\nmode = " << to_string(result.mode)
      << "\nn_edges = " << result.edges_s.size()
      << "\nsaturation_warning = " << (result.saturation_warning ? "true" : "false") << '\n';
  return out.str();
}

std::string to_text_table(const EvaluationReport& report) {
  std::ostringstream out;
  char line[96];
  std::snprintf(line, sizeof(line), "%12s %12s %10s\n", "actual_bpm", "measured_bpm", "error_pct");
  out << line;
  for (std::size_t i = 0; i < report.pairs.size(); ++i) {
    std::snprintf(line, sizeof(line), "%12.2f %12.2f %10.2f\n", report.pairs[i].actual_bpm,
                  report.pairs[i].measured_bpm, report.errors.per_pair_pct[i]);
    out << line;
  }
  std::snprintf(line, sizeof(line), "mean = %.4f  std = %.4f  n = %zu\n", report.errors.mean_pct,
                report.errors.std_pct, report.errors.n);
  out << line;
  for (const EvaluationFailure& f : report.failures) {
    out << "failure: true " << f.true_bpm << " bpm, " << f.reason << '\n';
  }
  return out.str();
}

}  // namespace hrm
