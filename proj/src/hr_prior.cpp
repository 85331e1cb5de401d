#include "pulsegraph/hr_prior.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <unsupported/Eigen/FFT>

#include "pulsegraph/error.hpp"
#include "pulsegraph/peaks.hpp"

namespace pulsegraph {

HrPrior::HrPrior(std::vector<double> centers, std::vector<double> hr, double window_len_s)
    : centers_(std::move(centers)), hr_(std::move(hr)), window_len_s_(window_len_s) {
  if (centers_.size() != hr_.size()) throw Error(ErrorCode::InvalidInput, "HrPrior: length mismatch");
  for (std::size_t i = 0; i < hr_.size(); ++i) {
    if (!(hr_[i] >= kMinHrBpm && hr_[i] <= kMaxHrBpm))
      throw Error(ErrorCode::RangeError, "HrPrior: HR " + std::to_string(hr_[i]) + " bpm outside [30, 240]");
    if (i > 0 && !(centers_[i] > centers_[i - 1]))
      throw Error(ErrorCode::InvalidInput, "HrPrior: window centers must increase");
  }
}

double HrPrior::hr_at(double t) const {
  if (centers_.empty()) throw Error(ErrorCode::MissingPrior, "empty HR prior");
  const auto it = std::lower_bound(centers_.begin(), centers_.end(), t);
  if (it == centers_.begin()) return hr_.front();
  if (it == centers_.end()) return hr_.back();
  const auto hi = static_cast<std::size_t>(it - centers_.begin());
  const auto lo = hi - 1;
  return (centers_[hi] - t) < (t - centers_[lo]) ? hr_[hi] : hr_[lo];
}

double avg_ibi_at(const HrPrior& prior, double t_s) { return 60000.0 / prior.hr_at(t_s); }

namespace {

struct SpectrumPeak {
  double hz;
  double power;
};

// Local maxima of the power spectrum within [min_hz, max_hz], refined parabolically.
std::vector<SpectrumPeak> spectral_peaks(const Eigen::VectorXd& power, double df, double min_hz, double max_hz) {
  std::vector<SpectrumPeak> out;
  const auto lo = static_cast<Eigen::Index>(std::ceil(min_hz / df));
  const auto hi = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(max_hz / df)), power.size() - 2);
  for (Eigen::Index k = std::max<Eigen::Index>(lo, 1); k <= hi; ++k) {
    if (power[k] > power[k - 1] && power[k] >= power[k + 1] && power[k] > 0.0)
      out.push_back({(static_cast<double>(k) + parabolic_offset(power, k)) * df, power[k]});
  }
  return out;
}

}  // namespace

HrPrior estimate_hr_spectral(const Waveform& ppg, const SpectralHrOptions& opts) {
  const double fs = ppg.sample_rate_hz;
  if (ppg.empty() || ppg.duration_s() < opts.window_len_s)
    throw Error(ErrorCode::InvalidInput, "estimate_hr_spectral: record shorter than one window");

  const auto win = static_cast<Eigen::Index>(std::round(opts.window_len_s * fs));
  const auto step = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::round(opts.step_s * fs)));
  const auto decim = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::floor(fs / opts.analysis_rate_hz)));
  const double rate = fs / static_cast<double>(decim);
  const Eigen::Index m = win / decim;
  const int nfft = std::max<int>(opts.fft_size, static_cast<int>(m));
  const double df = rate / nfft;

  Eigen::FFT<double> fft;
  std::vector<double> centers, hr;
  std::vector<double> frame(static_cast<std::size_t>(nfft));
  std::vector<std::complex<double>> spec;
  Eigen::VectorXd hann(m);
  for (Eigen::Index i = 0; i < m; ++i)
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(m));

  for (Eigen::Index start = 0; start + win <= ppg.size(); start += step) {
    Eigen::VectorXd block(m);
    for (Eigen::Index i = 0; i < m; ++i) block[i] = ppg.samples.segment(start + i * decim, decim).mean();
    block.array() -= block.mean();
    block.array() *= hann.array();
    std::fill(frame.begin(), frame.end(), 0.0);
    std::copy(block.data(), block.data() + m, frame.begin());
    fft.fwd(spec, frame);
    Eigen::VectorXd power(nfft / 2 + 1);
    for (int k = 0; k <= nfft / 2; ++k) power[k] = std::norm(spec[static_cast<std::size_t>(k)]);

    const auto peaks = spectral_peaks(power, df, opts.min_hz, opts.max_hz);
    const double center = ppg.time_at(static_cast<double>(start) + 0.5 * static_cast<double>(win));
    double bpm = 0.0;
    if (hr.empty()) {
      if (peaks.empty()) continue;
      bpm = 60.0 * std::max_element(peaks.begin(), peaks.end(), [](auto& a, auto& b) { return a.power < b.power; })->hz;
    } else {
      const double prev = hr.back();
      const SpectrumPeak* best = nullptr;
      for (const auto& p : peaks)
        if (std::abs(60.0 * p.hz - prev) <= opts.max_jump_bpm && (!best || p.power > best->power)) best = &p;
      bpm = best ? 60.0 * best->hz : prev;
    }
    centers.push_back(center);
    hr.push_back(std::clamp(bpm, kMinHrBpm, kMaxHrBpm));
  }
  if (hr.empty()) throw Error(ErrorCode::MissingPrior, "no spectral peak in the cardiac band");
  return HrPrior(std::move(centers), std::move(hr), opts.window_len_s);
}

namespace {

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

HrPrior parse_hr_csv(const std::string& text, double window_len_s) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> centers, hr;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto comma = line.find(',');
    double t = 0, bpm = 0;
    const bool ok = comma != std::string::npos && parse_double(std::string_view(line).substr(0, comma), t) &&
                    parse_double(std::string_view(line).substr(comma + 1), bpm);
    if (!ok) {
      if (line_no == 1 && line.rfind("t_s", 0) == 0) continue;
      throw Error(ErrorCode::ParseError, "HR file line " + std::to_string(line_no) + ": '" + line + "'");
    }
    if (!(bpm >= kMinHrBpm && bpm <= kMaxHrBpm))
      throw Error(ErrorCode::RangeError, "HR file line " + std::to_string(line_no) + ": " + std::to_string(bpm) +
                                             " bpm outside [30, 240]");
    if (!centers.empty() && !(t > centers.back()))
      throw Error(ErrorCode::ParseError, "HR file line " + std::to_string(line_no) + ": window centers must increase");
    centers.push_back(t);
    hr.push_back(bpm);
  }
  return HrPrior(std::move(centers), std::move(hr), window_len_s);
}

HrPrior load_hr_file(const std::filesystem::path& path, double window_len_s) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open HR file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_hr_csv(buf.str(), window_len_s);
}

}  // namespace pulsegraph
