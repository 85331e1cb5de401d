#include "pulsegraph/features.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pulsegraph/error.hpp"
#include "pulsegraph/peaks.hpp"

namespace pulsegraph {

namespace {

double interquartile_range(const Eigen::Ref<const Eigen::VectorXd>& x) {
  std::vector<double> v(x.data(), x.data() + x.size());
  std::sort(v.begin(), v.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return at(0.75) - at(0.25);
}

FiducialSeries detect(Feature feature, const Waveform& ppg, const Eigen::VectorXd& signal,
                      const FeatureOptions& opts, int channel_id) {
  FiducialSeries out;
  out.feature = feature;
  out.channel_id = channel_id;
  out.edge_margin_s = opts.edge_margin_s;
  out.span_begin_s = ppg.t0_s;
  out.span_end_s = ppg.empty() ? ppg.t0_s : ppg.end_s();
  if (signal.size() < 3) return out;

  PeakOptions popts;
  popts.min_distance = static_cast<Eigen::Index>(std::round(opts.min_peak_distance_s * ppg.sample_rate_hz));
  popts.min_prominence = opts.min_prominence_iqr * interquartile_range(signal);
  for (auto p : find_peaks(signal, popts)) {
    const double t = ppg.time_at(static_cast<double>(p) + parabolic_offset(signal, p));
    out.timestamps_s.push_back(std::clamp(t, out.span_begin_s, out.span_end_s));
  }
  return out;
}

}  // namespace

Eigen::VectorXd first_derivative(const Eigen::Ref<const Eigen::VectorXd>& x, double fs) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  if (n < 2) return d;
  for (Eigen::Index i = 1; i + 1 < n; ++i) d[i] = 0.5 * (x[i + 1] - x[i - 1]) * fs;
  d[0] = (x[1] - x[0]) * fs;
  d[n - 1] = (x[n - 1] - x[n - 2]) * fs;
  return d;
}

Eigen::VectorXd second_derivative(const Eigen::Ref<const Eigen::VectorXd>& x, double fs) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  if (n < 3) return d;
  for (Eigen::Index i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - 2.0 * x[i] + x[i - 1]) * fs * fs;
  d[0] = d[1];
  d[n - 1] = d[n - 2];
  return d;
}

FiducialSeries systolic_peak_candidates(const Waveform& ppg, const FeatureOptions& opts, int channel_id) {
  return detect(Feature::SystolicPeak, ppg, ppg.samples, opts, channel_id);
}

FiducialSeries max_slope_candidates(const Waveform& ppg, const FeatureOptions& opts, int channel_id) {
  return detect(Feature::MaxSlope, ppg, first_derivative(ppg.samples, ppg.sample_rate_hz), opts, channel_id);
}

FiducialSeries onset_candidates(const Waveform& ppg, const FeatureOptions& opts, int channel_id) {
  return detect(Feature::Onset, ppg, second_derivative(ppg.samples, ppg.sample_rate_hz), opts, channel_id);
}

FiducialSeries candidates(Feature feature, const Waveform& ppg, const FeatureOptions& opts, int channel_id) {
  switch (feature) {
    case Feature::SystolicPeak: return systolic_peak_candidates(ppg, opts, channel_id);
    case Feature::MaxSlope: return max_slope_candidates(ppg, opts, channel_id);
    case Feature::Onset: return onset_candidates(ppg, opts, channel_id);
    case Feature::Fused: break;
  }
  throw Error(ErrorCode::InvalidInput, "no candidate detector for the fused stream");
}

}  // namespace pulsegraph
