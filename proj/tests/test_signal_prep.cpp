#include <doctest.h>

#include "pulsegraph/error.hpp"
#include "pulsegraph/signal_prep.hpp"
#include "pulsegraph/synth.hpp"
#include "support.hpp"

using namespace pulsegraph;

namespace {

FiducialSeries detect(const Waveform& ecg) { return ecg_r_peaks(filter(ecg, FilterSpec::high_pass(0.5))); }

}  // namespace

TEST_CASE("Ricker kernel has unit energy and zero mean") {
  const Eigen::VectorXd k = ricker_kernel(6.0);
  CHECK(k.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(k.sum()) < 1e-3);
  CHECK(k.size() % 2 == 1);
}

TEST_CASE("75 bpm ECG train yields 800 ms intervals") {
  SynthConfig cfg;
  cfg.duration_s = 60.0;
  cfg.hr_profile = {{0.0, 75.0}};
  const SynthRecord rec = generate(cfg);
  const FiducialSeries r = detect(rec.ecg);
  CHECK(std::abs(static_cast<int>(r.size()) - 75) <= 1);
  for (std::size_t k = 1; k < r.size(); ++k) CHECK(std::abs((r.timestamps_s[k] - r.timestamps_s[k - 1]) * 1000.0 - 800.0) <= 2.0);
  for (std::size_t k = 1; k < r.size(); ++k) CHECK(r.timestamps_s[k] > r.timestamps_s[k - 1]);
}

TEST_CASE("detected R-peaks sit on the generated instants across a HR ramp") {
  SynthConfig cfg;
  cfg.duration_s = 120.0;
  cfg.hr_profile = {{0.0, 60.0}, {60.0, 160.0}, {120.0, 60.0}};
  const SynthRecord rec = generate(cfg);
  const FiducialSeries r = detect(rec.ecg);
  CHECK(r.size() == rec.r_peaks.size());
  const std::size_t n = std::min(r.size(), rec.r_peaks.size());
  for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(r.timestamps_s[k] - rec.r_peaks.timestamps_s[k]) < 2e-3);
}

TEST_CASE("all-zero ECG gives EmptyResult") {
  Waveform z;
  z.sample_rate_hz = 500.0;
  z.samples = Eigen::VectorXd::Zero(5000);
  try {
    ecg_r_peaks(z);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyResult);
  }
}

TEST_CASE("a 2 s dropout removes only the peaks inside it") {
  SynthConfig cfg;
  cfg.duration_s = 60.0;
  cfg.hr_profile = {{0.0, 75.0}};
  SynthRecord rec = generate(cfg);
  const double d0 = 30.3, d1 = 32.3;
  for (Eigen::Index k = 0; k < rec.ecg.size(); ++k)
    if (rec.ecg.time_at(k) >= d0 && rec.ecg.time_at(k) < d1) rec.ecg.samples[k] = 0.0;
  const FiducialSeries r = detect(rec.ecg);
  std::size_t expected = 0, matched = 0;
  for (double t : rec.r_peaks.timestamps_s) {
    const bool inside = t >= d0 && t < d1;
    const bool found = std::any_of(r.timestamps_s.begin(), r.timestamps_s.end(),
                                   [&](double x) { return std::abs(x - t) < 0.01; });
    if (inside) {
      CHECK_FALSE(found);
    } else {
      ++expected;
      matched += found;
    }
  }
  CHECK(matched == expected);
  for (double x : r.timestamps_s) CHECK_FALSE((x > d0 + 0.05 && x < d1 - 0.05));
}
