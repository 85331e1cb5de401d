#pragma once

#include "pulsegraph/types.hpp"

namespace pulsegraph {

struct FeatureOptions {
  double min_peak_distance_s{0.25};
  // Minimum prominence as a fraction of the interquartile range of the searched signal.
  double min_prominence_iqr{0.05};
  double edge_margin_s{1.0};
};

/// Local maxima of the preprocessed PPG.
FiducialSeries systolic_peak_candidates(const Waveform& ppg, const FeatureOptions& opts = {}, int channel_id = 1);
/// Local maxima of the first derivative (anacrotic upstroke).
FiducialSeries max_slope_candidates(const Waveform& ppg, const FeatureOptions& opts = {}, int channel_id = 1);
/// Local maxima of the second derivative (pulse foot).
FiducialSeries onset_candidates(const Waveform& ppg, const FeatureOptions& opts = {}, int channel_id = 1);

FiducialSeries candidates(Feature feature, const Waveform& ppg, const FeatureOptions& opts = {}, int channel_id = 1);

/// Central-difference derivatives scaled by the sample rate (one-sided at the ends).
Eigen::VectorXd first_derivative(const Eigen::Ref<const Eigen::VectorXd>& x, double sample_rate_hz);
Eigen::VectorXd second_derivative(const Eigen::Ref<const Eigen::VectorXd>& x, double sample_rate_hz);

}  // namespace pulsegraph
