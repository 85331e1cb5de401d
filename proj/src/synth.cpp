#include "pulsegraph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "pulsegraph/butterworth.hpp"
#include "pulsegraph/error.hpp"

namespace pulsegraph {

namespace {

// Log-normal shaped lobes: amplitude, mode (s at scale 1), log-width.
constexpr double kSysAmp = 1.0, kSysMode = 0.15, kSysWidth = 0.35;
constexpr double kDicAmp = 0.45, kDicMode = 0.38, kDicWidth = 0.18;
constexpr double kPulseSupport = 1.6;  // s at scale 1

double lobe(double tau, double amp, double mode, double width) {
  if (tau <= 0.0) return 0.0;
  const double l = std::log(tau / mode);
  return amp * std::exp(-l * l / (2.0 * width * width));
}

double gaussian(double t, double amp, double center, double width) {
  const double z = (t - center) / width;
  return amp * std::exp(-0.5 * z * z);
}

struct Beat {
  double r_s;      // R-peak instant
  double foot_s;   // PPG pulse foot
  double scale;
};

double ecg_beat(double t, const Beat& b) {
  const double s = b.scale;
  const double dt = t - b.r_s;
  return gaussian(dt, 0.12, -0.16 * s, 0.025) + gaussian(dt, -0.12, -0.025, 0.01) + gaussian(dt, 1.0, 0.0, 0.01) +
         gaussian(dt, -0.12, 0.025, 0.01) + gaussian(dt, 0.3, 0.16 + 0.14 * s, 0.05);
}

double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 80 && b - a > 1e-10; ++i) {
    if (fc > fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a), fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Refine the maximum of f over [a, b]: coarse grid, then golden section around the best node.
double argmax_in(const std::function<double(double)>& f, double a, double b, double grid = 5e-4) {
  double best_t = a, best = f(a);
  for (double t = a; t <= b; t += grid) {
    const double v = f(t);
    if (v > best) best = v, best_t = t;
  }
  return golden_max(f, std::max(a, best_t - grid), std::min(b, best_t + grid));
}

}  // namespace

double pulse_shape(double tau, double scale) {
  return lobe(tau, kSysAmp, kSysMode * scale, kSysWidth) + lobe(tau, kDicAmp, kDicMode * scale, kDicWidth);
}

double hr_profile_at(const std::vector<std::pair<double, double>>& p, double t) {
  if (p.empty()) return 72.0;
  if (t <= p.front().first) return p.front().second;
  if (t >= p.back().first) return p.back().second;
  const auto it = std::upper_bound(p.begin(), p.end(), t, [](double v, const auto& k) { return v < k.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  return lo.second + (hi.second - lo.second) * (t - lo.first) / (hi.first - lo.first);
}

void validate(const SynthConfig& cfg) {
  if (!(cfg.duration_s > 0.0) || !(cfg.sample_rate_hz > 0.0))
    throw Error(ErrorCode::InvalidInput, "synth: duration and sample rate must be positive");
  const auto& a = cfg.artifacts;
  if (cfg.ibi_jitter_ms < 0 || a.spike_rate_per_min < 0 || a.spike_amp_rel < 0 || a.wander_amp_rel < 0 ||
      a.noise_amp_rel < 0 || a.spike_width_s <= 0)
    throw Error(ErrorCode::InvalidInput, "synth: rates and amplitudes must be non-negative");
  for (const auto& [t, bpm] : cfg.hr_profile)
    if (bpm < 30.0 || bpm > 240.0) throw Error(ErrorCode::InvalidInput, "synth: HR profile outside [30, 240] bpm");
  if (cfg.channels != 1 && cfg.channels != 2) throw Error(ErrorCode::InvalidInput, "synth: channels must be 1 or 2");
}

SynthRecord generate(const SynthConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Beat instants.
  std::vector<double> r;
  double t = 0.5 * 60.0 / hr_profile_at(cfg.hr_profile, 0.0);
  while (t < cfg.duration_s) {
    r.push_back(t);
    double ibi = 60.0 / hr_profile_at(cfg.hr_profile, t);
    ibi += cfg.lf_modulation_ms / 1000.0 * std::sin(2.0 * std::numbers::pi * 0.1 * t);
    ibi += cfg.hf_modulation_ms / 1000.0 * std::sin(2.0 * std::numbers::pi * 0.25 * t);
    if (cfg.ibi_jitter_ms > 0) ibi += cfg.ibi_jitter_ms / 1000.0 * normal(rng);
    t += std::clamp(ibi, 0.25, 2.0);
  }

  std::vector<Beat> beats;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double ibi = k + 1 < r.size() ? r[k + 1] - r[k] : (k > 0 ? r[k] - r[k - 1] : 0.8);
    beats.push_back({r[k], r[k] + cfg.pulse_transit_s, std::clamp(ibi / 0.8, 0.55, 1.4)});
  }

  const double fs = cfg.sample_rate_hz;
  const auto n = static_cast<Eigen::Index>(std::llround(cfg.duration_s * fs));
  SynthRecord rec;
  rec.ppg.sample_rate_hz = rec.ecg.sample_rate_hz = fs;
  rec.ppg.samples = Eigen::VectorXd::Zero(n);
  rec.ecg.samples = Eigen::VectorXd::Zero(n);
  for (const auto& b : beats) {
    const auto lo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::floor(b.foot_s * fs)));
    const auto hi = std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(std::ceil((b.foot_s + kPulseSupport * b.scale) * fs)));
    for (Eigen::Index i = lo; i <= hi; ++i) rec.ppg.samples[i] += pulse_shape(static_cast<double>(i) / fs - b.foot_s, b.scale);
    const auto elo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::floor((b.r_s - 0.5) * fs)));
    const auto ehi = std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(std::ceil((b.r_s + 0.6) * fs)));
    for (Eigen::Index i = elo; i <= ehi; ++i) rec.ecg.samples[i] += ecg_beat(static_cast<double>(i) / fs, b);
  }

  // Clean continuous signal and its derivatives for annotation.
  auto clean = [&](double x) {
    double v = 0.0;
    for (const auto& b : beats)
      if (x > b.foot_s && x < b.foot_s + kPulseSupport * b.scale) v += pulse_shape(x - b.foot_s, b.scale);
    return v;
  };
  constexpr double h = 1e-4;
  auto d1 = [&](double x) { return (clean(x + h) - clean(x - h)) / (2.0 * h); };
  auto d2 = [&](double x) { return (clean(x + h) - 2.0 * clean(x) + clean(x - h)) / (h * h); };

  const double end_s = static_cast<double>(n - 1) / fs;
  const Feature order[3] = {Feature::SystolicPeak, Feature::MaxSlope, Feature::Onset};
  for (int f = 0; f < 3; ++f) {
    rec.fiducials[f].feature = order[f];
    rec.fiducials[f].span_end_s = end_s;
  }
  for (const auto& b : beats) {
    const double peak_hi = b.foot_s + 2.0 * kSysMode * b.scale;
    if (peak_hi > end_s) break;
    const double peak = argmax_in(clean, b.foot_s, peak_hi);
    const double slope = argmax_in(d1, b.foot_s + 0.01 * b.scale, peak);
    const double onset = argmax_in(d2, b.foot_s + 0.005 * b.scale, slope);
    rec.fiducials[0].timestamps_s.push_back(peak);
    rec.fiducials[1].timestamps_s.push_back(slope);
    rec.fiducials[2].timestamps_s.push_back(onset);
  }

  rec.r_peaks.feature = Feature::SystolicPeak;
  rec.r_peaks.channel_id = 0;
  rec.r_peaks.span_end_s = end_s;
  rec.r_peaks.timestamps_s = r;
  rec.true_ibis = IbiSequence::from_beats(r, Feature::Onset);

  // Artifacts, after annotation.
  auto contaminate = [&](Waveform& w, std::mt19937_64& g, std::vector<double>* spikes) {
    const auto& a = cfg.artifacts;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (a.spike_rate_per_min > 0) {
      std::poisson_distribution<int> count(a.spike_rate_per_min * cfg.duration_s / 60.0);
      const int k = count(g);
      std::vector<double> centers;
      for (int i = 0; i < k; ++i) centers.push_back(unif(g) * cfg.duration_s);
      std::sort(centers.begin(), centers.end());
      for (double c : centers) {
        const double half = 0.5 * a.spike_width_s;
        const auto lo = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil((c - half) * fs)));
        const auto hi = std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(std::floor((c + half) * fs)));
        for (Eigen::Index i = lo; i <= hi; ++i)
          w.samples[i] += a.spike_amp_rel * 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * (static_cast<double>(i) / fs - c) / a.spike_width_s));
      }
      if (spikes) *spikes = centers;
    }
    if (a.wander_amp_rel > 0) {
      for (int comp = 0; comp < 3; ++comp) {
        const double f = 0.05 + 0.25 * unif(g);
        const double phase = 2.0 * std::numbers::pi * unif(g);
        for (Eigen::Index i = 0; i < n; ++i)
          w.samples[i] += a.wander_amp_rel / 3.0 * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / fs + phase);
      }
    }
    if (a.noise_amp_rel > 0) {
      Eigen::VectorXd noise(n);
      for (Eigen::Index i = 0; i < n; ++i) noise[i] = normal(g);
      const double nyq = fs / 2.0;
      const double lo = std::clamp(a.noise_band_hz.first, 1e-3, nyq * 0.98);
      const double hi = std::clamp(a.noise_band_hz.second, lo * 1.01, nyq * 0.99);
      noise = sos_filter(butter_bandpass(2, lo, hi, fs), noise);
      const double rms = std::sqrt(noise.squaredNorm() / static_cast<double>(n));
      if (rms > 0) w.samples += noise * (a.noise_amp_rel / rms);
    }
  };

  if (cfg.channels == 2) {
    rec.ppg2 = rec.ppg;
    rec.ppg2.samples *= 0.9;
  }
  contaminate(rec.ppg, rng, &rec.spike_centers_s);
  if (cfg.channels == 2) {
    std::mt19937_64 rng2(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    contaminate(rec.ppg2, rng2, nullptr);
  }
  return rec;
}

Session to_session(const SynthRecord& rec, const std::string& id, const std::string& subject,
                   const std::string& activity) {
  Session s;
  s.manifest.session_id = id;
  s.manifest.subject = subject.empty() ? id : subject;
  s.manifest.activity = activity;
  s.manifest.ppg1 = {"ppg1.csv", rec.ppg.sample_rate_hz};
  s.ppg1 = rec.ppg;
  if (!rec.ppg2.empty()) {
    s.manifest.ppg2 = ChannelRef{"ppg2.csv", rec.ppg2.sample_rate_hz};
    s.ppg2 = rec.ppg2;
  }
  s.manifest.ecg = ChannelRef{"ecg.csv", rec.ecg.sample_rate_hz};
  s.ecg = rec.ecg;
  s.manifest.rpeaks_file = "rpeaks.csv";
  s.rpeaks = rec.r_peaks;
  return s;
}

}  // namespace pulsegraph
