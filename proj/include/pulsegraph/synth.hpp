#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "pulsegraph/session.hpp"
#include "pulsegraph/types.hpp"

namespace pulsegraph {

struct ArtifactSpec {
  double spike_rate_per_min{0};
  double spike_amp_rel{1.0};
  double spike_width_s{0.12};
  double wander_amp_rel{0};
  double noise_amp_rel{0};
  std::pair<double, double> noise_band_hz{0.5, 10.0};
};

struct SynthConfig {
  double duration_s{60};
  double sample_rate_hz{500};
  // Piecewise-linear (t_s, bpm) knots, held constant beyond the ends.
  std::vector<std::pair<double, double>> hr_profile{{0.0, 72.0}};
  double ibi_jitter_ms{0};
  // Sinusoidal IBI modulation (ms amplitude) at 0.1 Hz and 0.25 Hz.
  double lf_modulation_ms{0};
  double hf_modulation_ms{0};
  // R-peak to PPG pulse foot.
  double pulse_transit_s{0.2};
  ArtifactSpec artifacts;
  int channels{1};
  std::uint64_t seed{1};
};

/// Throws InvalidInput for negative rates/amplitudes or HR knots outside [30, 240] bpm.
void validate(const SynthConfig& cfg);

struct SynthRecord {
  Waveform ppg;
  Waveform ppg2;  // empty unless channels == 2
  Waveform ecg;
  FiducialSeries r_peaks;
  // Clean-signal fiducials in feature order: systolic peak, max slope, onset.
  std::array<FiducialSeries, 3> fiducials;
  IbiSequence true_ibis;
  std::vector<double> spike_centers_s;
};

/// Bit-for-bit deterministic for a fixed seed. Annotations come from the clean signal;
/// artifacts are added afterwards.
SynthRecord generate(const SynthConfig& cfg);

/// Session with ppg1 (ppg2), ecg and annotated R-peaks, ready for `write_session`.
Session to_session(const SynthRecord& rec, const std::string& session_id, const std::string& subject = {},
                   const std::string& activity = "synthetic");

double hr_profile_at(const std::vector<std::pair<double, double>>& profile, double t_s);

/// Clean single-beat PPG pulse as a function of time since its foot; `scale` stretches it.
double pulse_shape(double tau_s, double scale);

}  // namespace pulsegraph
