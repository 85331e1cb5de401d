#include <doctest.h>

#include <complex>

#include "pulsegraph/butterworth.hpp"
#include "pulsegraph/error.hpp"
#include "pulsegraph/signal_prep.hpp"
#include "support.hpp"

using namespace pulsegraph;
using cd = std::complex<double>;

namespace {

struct Probe {
  double f;
  cd h;
};

// Reference responses from an independent design (scipy.signal.butter + sosfreqz).
void check_response(const SosMatrix& sos, double fs, const std::vector<Probe>& probes) {
  for (const auto& p : probes) {
    const cd h = sos_response(sos, p.f, fs);
    CAPTURE(p.f);
    CHECK(std::abs(h - p.h) < 1e-9);
  }
}

}  // namespace

TEST_CASE("band-pass 0.5-15 Hz at 500 Hz matches reference response") {
  check_response(butter_bandpass(4, 0.5, 15.0, 500.0), 500.0,
                 {{0.05, {8.468399972538942e-05, -2.1897750471241988e-05}},
                  {0.5, {-0.7071067811898739, 2.4036735335454385e-12}},
                  {1.5, {0.8040301336508032, 0.5945787727333165}},
                  {5.0, {0.8058892154017777, -0.5920569125746712}},
                  {15.0, {-0.7071067811865418, 0.0}},
                  {30.0, {0.01399560752201838, 0.05251257698403229}},
                  {100.0, {0.00023737063965773947, 8.11983119189256e-05}}});
}

TEST_CASE("band-pass 0.7-15 Hz at 125 Hz matches reference response") {
  check_response(butter_bandpass(4, 0.7, 15.0, 125.0), 125.0,
                 {{0.05, {2.1368852711862047e-05, -3.855251003718588e-06}},
                  {0.5, {-0.09616503595028421, -0.21044720132913353}},
                  {1.5, {0.5072122470750076, 0.861520223683625}},
                  {5.0, {0.8803790856342645, -0.4742690108623331}},
                  {15.0, {-0.7071067811865468, 0.0}},
                  {30.0, {0.01261362339832218, 0.024082103722986886}}});
}

TEST_CASE("high-pass and odd-order low-pass match reference responses") {
  check_response(butter_highpass(4, 0.5, 500.0), 500.0,
                 {{0.05, {9.659454914803338e-05, -2.5869526862366234e-05}},
                  {0.5, {-0.7071067811891566, 0.0}},
                  {1.5, {0.6329108400570252, 0.7741262868901181}},
                  {15.0, {0.9962300692211488, 0.08675049958433122}},
                  {100.0, {0.9999361635354747, 0.011299064295604455}}});
  check_response(butter_lowpass(3, 10.0, 100.0), 100.0,
                 {{1.0, {0.9812896405420134, -0.1925352505684359}},
                  {10.0, {-0.5, -0.5}},
                  {20.0, {-0.07142857142857137, 0.05323971374999498}},
                  {40.0, {-0.00024706469696121684, 0.0011504430851648506}}});
}

TEST_CASE("every section is stable") {
  for (const auto& sos : {butter_bandpass(4, 0.5, 15.0, 500.0), butter_highpass(6, 0.5, 500.0),
                          butter_lowpass(5, 40.0, 125.0)}) {
    for (Eigen::Index r = 0; r < sos.rows(); ++r) {
      const cd disc = std::sqrt(cd(sos(r, 4) * sos(r, 4) - 4.0 * sos(r, 5)));
      CHECK(std::abs((-sos(r, 4) + disc) / 2.0) < 1.0);
      CHECK(std::abs((-sos(r, 4) - disc) / 2.0) < 1.0);
    }
  }
}

TEST_CASE("filtering: drift rejected, pulse band kept") {
  const double fs = 500.0;
  const auto drift = testing::sine_wave(0.05, fs, 200.0);
  const auto pulse = testing::sine_wave(1.5, fs, 200.0);
  Waveform mix = drift;
  mix.samples += pulse.samples;
  const Waveform y = filter(mix, FilterSpec::band_pass(0.5, 15.0));
  // Measure in the interior so the edges do not bias the estimates.
  const auto mid = y.samples.segment(20000, 60000);
  const double drift_gain = testing::dft_amplitude(mid, 0.05, fs);
  const double pulse_gain = testing::dft_amplitude(mid, 1.5, fs);
  CHECK(20.0 * std::log10(drift_gain) <= -20.0);
  CHECK(20.0 * std::log10(pulse_gain) >= -1.0);
}

TEST_CASE("zero-phase filtering keeps a symmetric pulse centred") {
  Waveform w;
  w.sample_rate_hz = 500.0;
  w.samples = Eigen::VectorXd::NullaryExpr(5000, [](Eigen::Index k) {
    const double z = (static_cast<double>(k) - 2500.0) / 40.0;
    return std::exp(-0.5 * z * z);
  });
  const Waveform y = filter(w, FilterSpec::band_pass(0.5, 15.0));
  Eigen::Index before, after;
  w.samples.maxCoeff(&before);
  y.samples.maxCoeff(&after);
  CHECK(std::abs(after - before) <= 1);
}

TEST_CASE("zeros in, zeros out; length preserved; deterministic") {
  Waveform z;
  z.sample_rate_hz = 125.0;
  z.samples = Eigen::VectorXd::Zero(1000);
  const Waveform y = filter(z, FilterSpec::band_pass(0.5, 15.0));
  CHECK(y.size() == 1000);
  CHECK(y.samples.cwiseAbs().maxCoeff() == 0.0);

  const auto s = testing::sine_wave(2.0, 125.0, 20.0);
  CHECK(filter(s, FilterSpec::high_pass(0.5)).samples == filter(s, FilterSpec::high_pass(0.5)).samples);
}

TEST_CASE("cutoffs outside Nyquist are rejected") {
  CHECK_THROWS_AS(validate(FilterSpec::band_pass(0.5, 70.0), 125.0), Error);
  CHECK_THROWS_AS(validate(FilterSpec::band_pass(15.0, 0.5), 500.0), Error);
  CHECK_THROWS_AS(validate(FilterSpec::band_pass(0.0, 15.0), 500.0), Error);
  CHECK_THROWS_AS(validate(FilterSpec::high_pass(300.0), 500.0), Error);
  try {
    validate(FilterSpec::band_pass(0.5, 70.0), 125.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidFilterSpec);
  }
  CHECK_NOTHROW(validate(FilterSpec::band_pass(0.7, 15.0), 125.0));
}
