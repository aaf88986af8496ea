#include "hrm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

namespace hrm {

namespace {

constexpr std::string_view kSignalHeader = "time_s,voltage_v";

std::string format_number(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

double parse_number(std::string_view text, std::size_t line) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw IoError("line " + std::to_string(line) + ": cannot parse number '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

void write_signal_csv(std::ostream& out, const SampledSignal& signal) {
  out << kSignalHeader << '\n';
  for (std::size_t i = 0; i < signal.size(); ++i) {
    out << format_number(signal.time_at(i)) << ',' << format_number(signal.samples[i]) << '\n';
  }
}

void write_signal_csv(const std::filesystem::path& path, const SampledSignal& signal) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_signal_csv(out, signal);
  if (!out) throw IoError("write to " + path.string() + " failed");
}

SampledSignal read_signal_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> times;
  std::vector<double> values;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!saw_header) {
      if (line != kSignalHeader) {
        throw IoError("line 1: expected header '" + std::string(kSignalHeader) + "'");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw IoError("line " + std::to_string(line_no) + ": expected two comma-separated fields");
    }
    const std::string_view view(line);
    times.push_back(parse_number(view.substr(0, comma), line_no));
    values.push_back(parse_number(view.substr(comma + 1), line_no));
  }
  if (values.empty()) throw ValidationError("no samples");
  if (values.size() < 2) throw ValidationError("need at least 2 samples to recover the sample rate");

  const double span = times.back() - times.front();
  if (!(span > 0.0)) throw IoError("time column is not increasing");
  const double raw_rate = static_cast<double>(times.size() - 1) / span;
  const double rate = std::round(raw_rate * 1e6) / 1e6;

  SampledSignal signal(rate, std::move(values), times.front());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expected = signal.time_at(i);
    if (std::abs(times[i] - expected) > 1e-6 * std::max(1.0, std::abs(expected))) {
      // Header occupies line 1.
      throw IoError("line " + std::to_string(i + 2) + ": time axis is not uniformly sampled");
    }
  }
  return signal;
}

SampledSignal read_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_signal_csv(in);
}

void write_response_csv(std::ostream& out, std::span<const double> freqs_hz,
                        std::span<const double> magnitudes_db) {
  if (freqs_hz.size() != magnitudes_db.size()) {
    throw ValidationError("frequency and magnitude columns differ in length");
  }
  out << "freq_hz,magnitude_db\n";
  for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
    out << format_number(freqs_hz[i]) << ',' << format_number(magnitudes_db[i]) << '\n';
  }
}

}  // namespace hrm
