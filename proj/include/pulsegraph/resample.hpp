#pragma once

#include <optional>

#include "pulsegraph/types.hpp"

namespace pulsegraph {

struct ResampleOptions {
  // Kaiser-windowed sinc design: stopband rejection and the transition band as a
  // fraction of the lower of the two Nyquist rates.
  double rejection_db{140.0};
  double transition_fraction{0.1};
  // Largest interpolation factor handled with a precomputed polyphase bank.
  long max_phases{4096};
};

/// Band-limited interpolation to `target_rate_hz`. Rational rate ratios with at most
/// `max_phases` phases use a polyphase bank; anything else evaluates the kernel directly.
/// Output has ceil(n * target / source) samples on the grid t0 + k / target.
Waveform resample(const Waveform& w, double target_rate_hz, const ResampleOptions& opts = {});

}  // namespace pulsegraph
