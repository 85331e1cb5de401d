#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pulsegraph/types.hpp"

namespace testing {

inline pulsegraph::Waveform sine_wave(double freq_hz, double rate_hz, double duration_s, double amp = 1.0,
                                      double phase = 0.0) {
  pulsegraph::Waveform w;
  w.sample_rate_hz = rate_hz;
  const auto n = static_cast<Eigen::Index>(std::llround(duration_s * rate_hz));
  w.samples = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index k) {
    return amp * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(k) / rate_hz + phase);
  });
  return w;
}

inline double rms(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

// Naive DFT magnitude at a single frequency; independent of any FFT code.
inline double dft_amplitude(const Eigen::Ref<const Eigen::VectorXd>& x, double freq_hz, double rate_hz) {
  double re = 0, im = 0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double ph = 2.0 * std::numbers::pi * freq_hz * static_cast<double>(k) / rate_hz;
    re += x[k] * std::cos(ph);
    im -= x[k] * std::sin(ph);
  }
  return 2.0 * std::hypot(re, im) / static_cast<double>(x.size());
}

inline pulsegraph::IbiSequence ibis_from_values(const std::vector<double>& ibis_ms, double t0 = 0.0) {
  std::vector<double> beats{t0};
  for (double v : ibis_ms) beats.push_back(beats.back() + v / 1000.0);
  auto s = pulsegraph::IbiSequence::from_beats(beats, pulsegraph::Feature::Onset);
  s.ibis_ms = ibis_ms;  // keep the exact values
  return s;
}

}  // namespace testing
