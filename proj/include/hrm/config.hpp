#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hrm/eval.hpp"
#include "hrm/pipeline.hpp"

namespace hrm {

struct EvalSettings {
  Denominator denominator = Denominator::kActual;
  std::vector<double> sweep_bpms{50, 60, 72, 90, 110, 125};
};

/// One run-config document: INI sections [run], [pulse], [optics], [divider],
/// [noise], [filter], [amplifier], [detector], [eval] and, optionally,
/// [coefficients] holding `section0 = b0 b1 b2 a1 a2` lines.
struct RunConfig {
  PipelineConfig pipeline;
  EvalSettings eval;

  void validate() const { pipeline.validate(); }
};

/// Keys absent from the document keep their defaults. Unknown keys and
/// unparseable values raise ValidationError naming `section.key`.
[[nodiscard]] RunConfig parse_run_config(std::istream& in);
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);

/// Writes every field (and the realized coefficients) at full precision.
void write_run_config(std::ostream& out, const RunConfig& cfg, bool include_coefficients = true);

}  // namespace hrm
