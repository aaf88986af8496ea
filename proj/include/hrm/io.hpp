#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include "hrm/signal.hpp"

namespace hrm {

/// `time_s,voltage_v` with one sample per line, LF endings, %.17g values.
void write_signal_csv(std::ostream& out, const SampledSignal& signal);
void write_signal_csv(const std::filesystem::path& path, const SampledSignal& signal);

/// Parses the signal CSV. The sample rate is recovered from the time column
/// (snapped to 1e-6 Hz) and every row's time must agree with t0 + i/rate.
/// Malformed rows raise IoError naming the line; an empty body raises
/// ValidationError("no samples").
[[nodiscard]] SampledSignal read_signal_csv(std::istream& in);
[[nodiscard]] SampledSignal read_signal_csv(const std::filesystem::path& path);

/// `freq_hz,magnitude_db`.
void write_response_csv(std::ostream& out, std::span<const double> freqs_hz,
                        std::span<const double> magnitudes_db);

}  // namespace hrm
