#include "hrm/signal.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace hrm {

SampledSignal::SampledSignal(double rate_hz, std::vector<double> values, double start_s)
    : sample_rate_hz(rate_hz), samples(std::move(values)), t0_s(start_s) {
  validate();
}

void SampledSignal::validate() const {
  if (!(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0)) {
    throw ValidationError("sample_rate_hz must be positive and finite");
  }
  if (!std::isfinite(t0_s)) throw ValidationError("t0_s must be finite");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw ValidationError("sample " + std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace hrm
