#include <doctest.h>

#include "pulsegraph/error.hpp"
#include "pulsegraph/peaks.hpp"
#include "pulsegraph/signal_prep.hpp"
#include "pulsegraph/smoothing_spline.hpp"
#include "pulsegraph/synth.hpp"
#include "support.hpp"

using namespace pulsegraph;

TEST_CASE("B-spline basis weights form a partition of unity") {
  for (int degree : {1, 3, 5})
    for (double u : {0.0, 0.13, 0.5, 0.999}) {
      const Eigen::VectorXd w = uniform_bspline_weights(degree, u);
      CHECK(w.size() == degree + 1);
      CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(w.minCoeff() >= 0.0);
    }
}

TEST_CASE("constant signal passes through unchanged") {
  Waveform w;
  w.sample_rate_hz = 500.0;
  w.samples = Eigen::VectorXd::Constant(2000, 3.25);
  CHECK(smooth_spline(w).samples == w.samples);
}

TEST_CASE("too-short input is rejected") {
  Waveform w;
  w.sample_rate_hz = 500.0;
  w.samples = Eigen::VectorXd::Random(20);
  CHECK_THROWS_AS(smooth_spline(w), Error);
}

TEST_CASE("noise floor estimate recovers white-noise SD on a smooth signal") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 0.05);
  auto w = testing::sine_wave(1.2, 500.0, 30.0);
  for (Eigen::Index k = 0; k < w.size(); ++k) w.samples[k] += n(rng);
  CHECK(estimate_noise_floor(w.samples) == doctest::Approx(0.05).epsilon(0.05));
}

TEST_CASE("smoothing halves noise variance at 10 dB SNR") {
  SynthConfig cfg;
  cfg.duration_s = 30.0;
  const SynthRecord rec = generate(cfg);
  const Eigen::VectorXd clean = rec.ppg.samples;
  const double signal_power = (clean.array() - clean.mean()).square().mean();
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, std::sqrt(signal_power / 10.0));
  Waveform noisy = rec.ppg;
  for (Eigen::Index k = 0; k < noisy.size(); ++k) noisy.samples[k] += n(rng);
  const Waveform sm = smooth_spline(noisy);
  const double before = (noisy.samples - clean).squaredNorm();
  const double after = (sm.samples - clean).squaredNorm();
  CHECK(after <= 0.5 * before);
}

TEST_CASE("smoothing does not change the peak count of a clean pulse train") {
  SynthConfig cfg;
  cfg.duration_s = 60.0;
  const SynthRecord rec = generate(cfg);
  const Waveform filtered = filter(rec.ppg, FilterSpec::band_pass(0.5, 15.0));
  const Waveform sm = smooth_spline(filtered);
  // Count maxima that rise above floating-point ripple in the flat diastolic tail.
  PeakOptions opts;
  opts.min_prominence = 1e-6;
  const auto before = find_peaks(filtered.samples, opts).size();
  CHECK(before >= 140);
  CHECK(find_peaks(sm.samples, opts).size() == before);
}

TEST_CASE("natural cubic spline is exact on straight lines and interpolates its knots") {
  Eigen::VectorXd x(5), y(5);
  x << 0.0, 0.7, 1.1, 2.5, 3.0;
  y = 2.0 * x.array() - 1.0;
  Eigen::VectorXd xq = Eigen::VectorXd::LinSpaced(31, 0.0, 3.0);
  const Eigen::VectorXd yq = natural_cubic_spline(x, y, xq);
  CHECK((yq.array() - (2.0 * xq.array() - 1.0)).abs().maxCoeff() < 1e-12);

  Eigen::VectorXd y2(5);
  y2 << 1.0, -2.0, 0.5, 4.0, 3.0;
  const Eigen::VectorXd at_knots = natural_cubic_spline(x, y2, x);
  CHECK((at_knots - y2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("natural cubic spline matches a hand-solved three-knot case") {
  // Knots (0,0), (1,1), (2,0): the middle second derivative solves 4 M1 = 6 (0 - 2 + 0) → M1 = -3.
  // On [0,1]: S(x) = -0.5 x^3 + 1.5 x, so S(0.5) = 0.6875.
  Eigen::VectorXd x(3), y(3), q(2);
  x << 0, 1, 2;
  y << 0, 1, 0;
  q << 0.5, 1.5;
  const Eigen::VectorXd s = natural_cubic_spline(x, y, q);
  CHECK(s[0] == doctest::Approx(0.6875).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(0.6875).epsilon(1e-12));
}
