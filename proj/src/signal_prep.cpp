#include "pulsegraph/signal_prep.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pulsegraph/butterworth.hpp"
#include "pulsegraph/error.hpp"
#include "pulsegraph/peaks.hpp"

namespace pulsegraph {

void validate(const FilterSpec& spec, double fs) {
  const double nyq = fs / 2.0;
  if (spec.order < 1) throw Error(ErrorCode::InvalidFilterSpec, "order must be positive");
  if (!(spec.low_cut_hz > 0.0 && spec.low_cut_hz < nyq))
    throw Error(ErrorCode::InvalidFilterSpec,
                "low cut " + std::to_string(spec.low_cut_hz) + " Hz outside (0, " + std::to_string(nyq) + ")");
  if (spec.kind == FilterSpec::Kind::BandPass) {
    if (!spec.high_cut_hz || !(*spec.high_cut_hz > spec.low_cut_hz && *spec.high_cut_hz < nyq))
      throw Error(ErrorCode::InvalidFilterSpec, "band-pass needs low < high < Nyquist");
  }
}

Waveform filter(const Waveform& w, const FilterSpec& spec) {
  validate(spec, w.sample_rate_hz);
  const SosMatrix sos = spec.kind == FilterSpec::Kind::BandPass
                            ? butter_bandpass(spec.order, spec.low_cut_hz, *spec.high_cut_hz, w.sample_rate_hz)
                            : butter_highpass(spec.order, spec.low_cut_hz, w.sample_rate_hz);
  Waveform out = w;
  if (w.empty()) return out;
  out.samples = spec.zero_phase ? sos_filtfilt(sos, w.samples, settling_length(sos)) : sos_filter(sos, w.samples);
  return out;
}

Waveform smooth_spline(const Waveform& w, const SmoothingSplineOptions& opts) {
  if (w.empty()) throw Error(ErrorCode::InvalidInput, "smooth_spline: empty waveform");
  const double step = opts.knot_spacing_s * w.sample_rate_hz;
  if (static_cast<double>(w.size()) < (opts.degree + 1) * step)
    throw Error(ErrorCode::InvalidInput, "smooth_spline: input shorter than spline support");
  if (w.samples.maxCoeff() == w.samples.minCoeff()) return w;
  Waveform out = w;
  out.samples = fit_smoothing_spline(w.samples, w.sample_rate_hz, opts).fitted;
  return out;
}

Eigen::VectorXd ricker_kernel(double scale) {
  const Eigen::Index half = static_cast<Eigen::Index>(std::ceil(5.0 * scale));
  Eigen::VectorXd k(2 * half + 1);
  for (Eigen::Index i = -half; i <= half; ++i) {
    const double t = static_cast<double>(i) / scale;
    k[i + half] = (1.0 - t * t) * std::exp(-0.5 * t * t);
  }
  return k / k.norm();
}

Eigen::VectorXd ricker_cwt(const Eigen::Ref<const Eigen::VectorXd>& x, double scale) {
  const Eigen::VectorXd k = ricker_kernel(scale);
  const Eigen::Index half = k.size() / 2;
  const Eigen::Index n = x.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - half);
    const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + half);
    out[i] = k.segment(lo - i + half, hi - lo + 1).dot(x.segment(lo, hi - lo + 1));
  }
  return out;
}

namespace {

double quantile(std::vector<double> v, double q) {
  const auto k = static_cast<std::size_t>(std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

}  // namespace

FiducialSeries ecg_r_peaks(const Waveform& ecg, const RPeakOptions& opts) {
  if (ecg.empty()) throw Error(ErrorCode::InvalidInput, "ecg_r_peaks: empty waveform");
  const double scale = opts.wavelet_center_frequency * ecg.sample_rate_hz / opts.qrs_frequency_hz;
  const Eigen::VectorXd response = ricker_cwt(ecg.samples, scale);

  std::vector<double> values(response.data(), response.data() + response.size());
  const double med = quantile(values, 0.5);
  for (auto& v : values) v = std::abs(v - med);
  const double mad = quantile(values, 0.5);
  const double threshold = med + opts.mad_factor * mad;

  PeakOptions popts;
  popts.min_height = std::nextafter(threshold, std::numeric_limits<double>::infinity());
  popts.min_distance = static_cast<Eigen::Index>(std::round(opts.refractory_s * ecg.sample_rate_hz));
  auto peaks = find_peaks(response, popts);
  if (mad == 0.0 && response.cwiseAbs().maxCoeff() == 0.0) peaks.clear();
  if (!peaks.empty() && opts.relative_height > 0.0) {
    std::vector<double> heights;
    for (auto p : peaks) heights.push_back(response[p]);
    const double floor = opts.relative_height * quantile(heights, 0.9);
    std::erase_if(peaks, [&](Eigen::Index p) { return response[p] < floor; });
  }
  if (peaks.empty()) throw Error(ErrorCode::EmptyResult, "no R-peaks found");

  FiducialSeries out;
  out.feature = Feature::SystolicPeak;
  out.channel_id = 0;
  out.span_begin_s = ecg.t0_s;
  out.span_end_s = ecg.end_s();
  for (auto p : peaks)
    out.timestamps_s.push_back(ecg.time_at(static_cast<double>(p) + parabolic_offset(response, p)));
  return out;
}

}  // namespace pulsegraph
