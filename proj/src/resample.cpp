#include "pulsegraph/resample.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "pulsegraph/error.hpp"

namespace pulsegraph {

namespace {

struct Ratio {
  long up{1};
  long down{1};
};

// Continued-fraction approximation of target/source; empty when no fraction
// with at most `max_up` phases reproduces the ratio to ~1e-12.
std::optional<Ratio> rational_ratio(double target, double source, long max_up) {
  const double r = target / source;
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double x = r;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_f = std::floor(x);
    if (a_f > 1e12) break;
    const long a = static_cast<long>(a_f);
    const long h2 = a * h1 + h0;
    const long k2 = a * k1 + k0;
    if (h2 > max_up) break;
    h0 = h1, h1 = h2, k0 = k1, k1 = k2;
    if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - r) <= 1e-12 * r) {
      const long g = std::gcd(h1, k1);
      return Ratio{h1 / g, k1 / g};
    }
    const double frac = x - a_f;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  return std::nullopt;
}

// Kaiser-windowed sinc low-pass evaluated in continuous time (seconds).
class SincKernel {
 public:
  SincKernel(double source_rate, double target_rate, const ResampleOptions& opts) {
    const double nyq = 0.5 * std::min(source_rate, target_rate);
    const double transition = opts.transition_fraction * nyq;
    cutoff_hz_ = nyq - 0.5 * transition;
    const double a = opts.rejection_db;
    beta_ = a > 50.0 ? 0.1102 * (a - 8.7) : (a >= 21.0 ? 0.5842 * std::pow(a - 21.0, 0.4) + 0.07886 * (a - 21.0) : 0.0);
    const double taps = (a - 7.95) / (2.285 * 2.0 * std::numbers::pi * transition / source_rate) + 1.0;
    half_width_s_ = 0.5 * taps / source_rate;
    gain_ = 2.0 * cutoff_hz_ / source_rate;
    i0_beta_ = std::cyl_bessel_i(0.0, beta_);
  }

  double half_width_s() const { return half_width_s_; }

  double operator()(double t) const {
    const double r = t / half_width_s_;
    if (std::abs(r) >= 1.0) return 0.0;
    const double arg = 2.0 * cutoff_hz_ * t;
    const double sinc = std::abs(arg) < 1e-12 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
    return gain_ * sinc * std::cyl_bessel_i(0.0, beta_ * std::sqrt(1.0 - r * r)) / i0_beta_;
  }

 private:
  double cutoff_hz_{0};
  double beta_{0};
  double half_width_s_{0};
  double gain_{1};
  double i0_beta_{1};
};

Eigen::VectorXd odd_reflect(const Eigen::VectorXd& x, Eigen::Index pad) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd ext(n + 2 * pad);
  ext.segment(pad, n) = x;
  for (Eigen::Index k = 0; k < pad; ++k) {
    const Eigen::Index left = std::min(pad - k, n - 1);
    const Eigen::Index right = std::max<Eigen::Index>(n - 2 - k, 0);
    ext[k] = 2.0 * x[0] - x[left];
    ext[n + pad + k] = 2.0 * x[n - 1] - x[right];
  }
  return ext;
}

}  // namespace

Waveform resample(const Waveform& w, double target_rate_hz, const ResampleOptions& opts) {
  if (w.empty()) throw Error(ErrorCode::InvalidInput, "resample: empty waveform");
  if (!(target_rate_hz > 0.0) || !(w.sample_rate_hz > 0.0))
    throw Error(ErrorCode::InvalidInput, "resample: sample rates must be positive");
  if (target_rate_hz == w.sample_rate_hz) return w;

  const double fs_in = w.sample_rate_hz;
  const SincKernel kernel(fs_in, target_rate_hz, opts);
  const Eigen::Index reach = static_cast<Eigen::Index>(std::ceil(kernel.half_width_s() * fs_in));
  const Eigen::Index n = w.size();
  const Eigen::VectorXd ext = odd_reflect(w.samples, reach);

  Waveform out;
  out.sample_rate_hz = target_rate_hz;
  out.t0_s = w.t0_s;

  if (const auto ratio = rational_ratio(target_rate_hz, fs_in, opts.max_phases)) {
    const long up = ratio->up, down = ratio->down;
    const Eigen::Index n_out = static_cast<Eigen::Index>((static_cast<long long>(n) * up + down - 1) / down);
    // bank(p, j): weight of input sample n0 + j - reach + 1 for phase p / up.
    const Eigen::Index taps = 2 * reach;
    Eigen::MatrixXd bank(up, taps);
    for (long p = 0; p < up; ++p)
      for (Eigen::Index j = 0; j < taps; ++j) {
        const double offset = static_cast<double>(p) / static_cast<double>(up) - static_cast<double>(j - reach + 1);
        bank(p, j) = kernel(offset / fs_in);
      }
    out.samples.resize(n_out);
    for (Eigen::Index m = 0; m < n_out; ++m) {
      const long long pos = static_cast<long long>(m) * down;
      const Eigen::Index n0 = static_cast<Eigen::Index>(pos / up);
      const long phase = static_cast<long>(pos % up);
      // ext index of input sample i is i + reach.
      out.samples[m] = bank.row(phase).dot(ext.segment(n0 + 1, taps));
    }
    return out;
  }

  const double ratio = target_rate_hz / fs_in;
  const Eigen::Index n_out = static_cast<Eigen::Index>(std::ceil(static_cast<double>(n) * ratio - 1e-9));
  out.samples.resize(n_out);
  for (Eigen::Index m = 0; m < n_out; ++m) {
    const double pos = static_cast<double>(m) / ratio;
    const Eigen::Index n0 = static_cast<Eigen::Index>(std::floor(pos));
    double acc = 0.0;
    for (Eigen::Index i = n0 - reach + 1; i <= n0 + reach; ++i)
      acc += ext[i + reach] * kernel((pos - static_cast<double>(i)) / fs_in);
    out.samples[m] = acc;
  }
  return out;
}

}  // namespace pulsegraph
