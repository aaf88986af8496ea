#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hrm {

/// Raised when an input violates a type invariant or operation precondition.
/// The message names the offending field where one exists.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for unreadable/unwritable files and malformed file content.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniformly sampled voltage (or power) time series.
struct SampledSignal {
  double sample_rate_hz = 500.0;
  std::vector<double> samples;
  double t0_s = 0.0;

  SampledSignal() = default;
  SampledSignal(double rate_hz, std::vector<double> values, double start_s = 0.0);

  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
  [[nodiscard]] bool empty() const noexcept { return samples.empty(); }
  [[nodiscard]] double duration_s() const noexcept {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  /// Timestamp of sample i. Every stage computes time this way so that
  /// results are bit-identical regardless of where the signal came from.
  [[nodiscard]] double time_at(std::size_t i) const noexcept {
    return t0_s + static_cast<double>(i) / sample_rate_hz;
  }

  /// Throws ValidationError unless the rate is positive and every sample finite.
  void validate() const;

  friend bool operator==(const SampledSignal&, const SampledSignal&) = default;
};

}  // namespace hrm
