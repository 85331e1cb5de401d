#pragma once

#include <array>
#include <utility>

#include "pulsegraph/types.hpp"

namespace pulsegraph {

struct HrvTime {
  double mean_rr_ms{0};
  double mean_hr_bpm{0};
  double sdnn_ms{0};
  double std_hr_bpm{0};
};

struct HrvFrequency {
  double vlf_power_ms2{0};
  double lf_power_ms2{0};
  double hf_power_ms2{0};
  double total_power_ms2{0};
};

struct HrvReport {
  double mean_rr_ms{0};
  double mean_hr_bpm{0};
  double sdnn_ms{0};
  double std_hr_bpm{0};
  double vlf_power_ms2{0};
  double lf_power_ms2{0};
  double hf_power_ms2{0};
  double total_power_ms2{0};

  static constexpr std::size_t kParameters = 8;
  /// Parameter values in table order (Mean RR ... Total Power).
  std::array<double, kParameters> values() const {
    return {mean_rr_ms, mean_hr_bpm, sdnn_ms, std_hr_bpm, vlf_power_ms2, lf_power_ms2, hf_power_ms2, total_power_ms2};
  }
  static const std::array<const char*, kParameters>& names();
};

struct HrvOptions {
  int ar_order{16};
  double tachogram_rate_hz{4.0};
  double vlf_low_hz{0.003};
  double lf_low_hz{0.04};
  double hf_low_hz{0.15};
  double hf_high_hz{0.4};
  double min_record_s{60.0};
  // Per-beat HR mean; false gives 60000 / mean RR.
  bool mean_hr_per_beat{true};
  // Frequency resolution for band integration.
  double psd_step_hz{0.0005};
};

/// Needs at least two intervals (InvalidInput otherwise). SDNN / STD HR are population SDs.
HrvTime time_domain(const IbiSequence& ibis, const HrvOptions& opts = {});

/// Uniformly resampled, mean-removed tachogram of the interval series, keyed on
/// interval end times. Also returns the sample times.
std::pair<Eigen::VectorXd, Eigen::VectorXd> tachogram(const IbiSequence& ibis, double rate_hz);

/// AR (Burg) band powers of the tachogram. Needs min_record_s of beats.
HrvFrequency frequency_domain(const IbiSequence& ibis, const HrvOptions& opts = {});

HrvReport hrv_report(const IbiSequence& ibis, const HrvOptions& opts = {});

}  // namespace pulsegraph
