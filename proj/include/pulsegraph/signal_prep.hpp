#pragma once

#include <optional>

#include "pulsegraph/resample.hpp"
#include "pulsegraph/smoothing_spline.hpp"
#include "pulsegraph/types.hpp"

namespace pulsegraph {

struct FilterSpec {
  enum class Kind { BandPass, HighPass };
  Kind kind{Kind::BandPass};
  double low_cut_hz{0.5};
  std::optional<double> high_cut_hz{15.0};
  int order{4};
  bool zero_phase{true};

  static FilterSpec band_pass(double lo, double hi, int order = 4) {
    return {Kind::BandPass, lo, hi, order, true};
  }
  static FilterSpec high_pass(double lo, int order = 4) {
    return {Kind::HighPass, lo, std::nullopt, order, true};
  }
};

/// Throws InvalidFilterSpec when the cutoffs do not fit below Nyquist.
void validate(const FilterSpec& spec, double sample_rate_hz);

/// Butterworth filtering. Zero-phase runs forward-backward with reflect padding of one
/// settling length (capped by the record length).
Waveform filter(const Waveform& w, const FilterSpec& spec);

Waveform smooth_spline(const Waveform& w, const SmoothingSplineOptions& opts = {});

struct RPeakOptions {
  // Dimensionless center frequency of the Mexican-hat mother wavelet.
  double wavelet_center_frequency{0.25};
  // QRS pseudo-frequency that the wavelet scale is tuned to.
  double qrs_frequency_hz{15.0};
  double mad_factor{3.0};
  double refractory_s{0.25};
  // Peaks below this fraction of the 90th percentile of accepted responses are
  // dropped (T waves clear the MAD threshold on clean ECG).
  double relative_height{0.3};
};

/// Ricker kernel for a scale expressed in samples, normalized to unit L2 norm.
Eigen::VectorXd ricker_kernel(double scale_samples);

/// Single-scale CWT response (same length as input).
Eigen::VectorXd ricker_cwt(const Eigen::Ref<const Eigen::VectorXd>& x, double scale_samples);

/// R-peak instants of a high-passed ECG. Throws EmptyResult when nothing is found.
FiducialSeries ecg_r_peaks(const Waveform& ecg, const RPeakOptions& opts = {});

}  // namespace pulsegraph
