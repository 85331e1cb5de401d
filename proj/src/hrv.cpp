#include "pulsegraph/hrv.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pulsegraph/burg.hpp"
#include "pulsegraph/error.hpp"
#include "pulsegraph/smoothing_spline.hpp"

namespace pulsegraph {

const std::array<const char*, HrvReport::kParameters>& HrvReport::names() {
  static const std::array<const char*, kParameters> n{"mean_rr_ms",    "mean_hr_bpm",  "sdnn_ms",
                                                      "std_hr_bpm",    "vlf_power_ms2", "lf_power_ms2",
                                                      "hf_power_ms2",  "total_power_ms2"};
  return n;
}

HrvTime time_domain(const IbiSequence& ibis, const HrvOptions& opts) {
  if (ibis.size() < 2) throw Error(ErrorCode::InvalidInput, "time-domain HRV needs >= 2 intervals");
  const Eigen::VectorXd rr = ibis.values();
  const Eigen::VectorXd hr = (60000.0 / rr.array()).matrix();
  const auto pop_sd = [](const Eigen::VectorXd& v) {
    if (v.minCoeff() == v.maxCoeff()) return 0.0;
    return std::sqrt((v.array() - v.mean()).square().mean());
  };
  HrvTime out;
  out.mean_rr_ms = rr.mean();
  out.sdnn_ms = pop_sd(rr);
  out.mean_hr_bpm = opts.mean_hr_per_beat ? hr.mean() : 60000.0 / out.mean_rr_ms;
  out.std_hr_bpm = pop_sd(hr);
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> tachogram(const IbiSequence& ibis, double rate_hz) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(ibis.size());
  for (std::size_t k = 0; k < ibis.size(); ++k) pts.emplace_back(ibis.end_s(k), ibis.ibis_ms[k]);
  std::stable_sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first < b.first; });
  Eigen::VectorXd x(static_cast<Eigen::Index>(pts.size())), y(x.size());
  Eigen::Index m = 0;
  for (const auto& [t, v] : pts) {
    if (m > 0 && !(t > x[m - 1])) continue;
    x[m] = t;
    y[m] = v;
    ++m;
  }
  if (m < 2) throw Error(ErrorCode::InvalidInput, "tachogram needs >= 2 distinct beats");
  x.conservativeResize(m);
  y.conservativeResize(m);
  const auto samples = static_cast<Eigen::Index>(std::floor((x[m - 1] - x[0]) * rate_hz)) + 1;
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(samples, 0.0, static_cast<double>(samples - 1)) / rate_hz;
  t.array() += x[0];
  Eigen::VectorXd v = natural_cubic_spline(x, y, t);
  v.array() -= v.mean();
  return {t, v};
}

namespace {

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol || std::abs(diff) <= 1e-12 * std::abs(left + right))
    return left + right + diff / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol, depth - 1);
}

// AR spectra of near-periodic tachograms have lines far narrower than any fixed grid, so pole
// frequencies are used as breakpoints and each piece is refined adaptively.
double band_power(const ArModel<double>& model, double lo, double hi, double rate, double step) {
  std::vector<double> cuts{lo, hi};
  const auto intervals = std::max<long>(1, std::lround(std::ceil((hi - lo) / step)));
  for (long i = 1; i < intervals; ++i) cuts.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(intervals));
  for (double f : model.pole_frequencies(rate))
    if (f > lo && f < hi) cuts.push_back(f);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto psd = [&](double f) { return model.psd(f, rate); };
  std::vector<double> values(cuts.size());
  double coarse = 0.0;
  for (std::size_t i = 0; i < cuts.size(); ++i) values[i] = psd(cuts[i]);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    coarse += 0.5 * (values[i] + values[i + 1]) * (cuts[i + 1] - cuts[i]);
  if (!(coarse > 0.0)) return 0.0;
  const double tol = 1e-12 * coarse;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const double fm = psd(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (values[i] + 4.0 * fm + values[i + 1]);
    acc += adaptive_simpson(psd, a, b, values[i], fm, values[i + 1], whole, tol, 40);
  }
  return acc;
}

}  // namespace

HrvFrequency frequency_domain(const IbiSequence& ibis, const HrvOptions& opts) {
  if (ibis.size() < 2) throw Error(ErrorCode::InvalidInput, "frequency-domain HRV needs intervals");
  const double span = ibis.end_s(ibis.size() - 1) - ibis.starts_s.front();
  if (span < opts.min_record_s)
    throw Error(ErrorCode::InvalidInput, "frequency-domain HRV needs >= " + std::to_string(opts.min_record_s) + " s");
  const auto [t, v] = tachogram(ibis, opts.tachogram_rate_hz);
  HrvFrequency out;
  if (v.cwiseAbs().maxCoeff() < 1e-9) return out;
  const auto model = burg(v, opts.ar_order);
  const double rate = opts.tachogram_rate_hz;
  out.vlf_power_ms2 = band_power(model, opts.vlf_low_hz, opts.lf_low_hz, rate, opts.psd_step_hz);
  out.lf_power_ms2 = band_power(model, opts.lf_low_hz, opts.hf_low_hz, rate, opts.psd_step_hz);
  out.hf_power_ms2 = band_power(model, opts.hf_low_hz, opts.hf_high_hz, rate, opts.psd_step_hz);
  out.total_power_ms2 = out.vlf_power_ms2 + out.lf_power_ms2 + out.hf_power_ms2;
  return out;
}

HrvReport hrv_report(const IbiSequence& ibis, const HrvOptions& opts) {
  const auto td = time_domain(ibis, opts);
  const auto fd = frequency_domain(ibis, opts);
  return {td.mean_rr_ms,    td.mean_hr_bpm,  td.sdnn_ms,      td.std_hr_bpm,
          fd.vlf_power_ms2, fd.lf_power_ms2, fd.hf_power_ms2, fd.total_power_ms2};
}

}  // namespace pulsegraph
