#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "pulsegraph/error.hpp"
#include "pulsegraph/eval.hpp"
#include "support.hpp"

using namespace pulsegraph;

namespace {

std::vector<double> varied_beats(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> jitter(0.0, 0.04);
  std::vector<double> beats{0.3};
  for (int i = 1; i < n; ++i) beats.push_back(beats.back() + 0.8 + jitter(rng));
  return beats;
}

double naive_corr(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

AlignedPairs pairs_of(const std::vector<double>& t, const std::vector<double>& e) {
  AlignedPairs a;
  for (std::size_t i = 0; i < t.size(); ++i) a.pairs.push_back({t[i], e[i], static_cast<double>(i)});
  return a;
}

HrvReport report_from(double base) {
  HrvReport r;
  r.mean_rr_ms = base;
  r.mean_hr_bpm = 60000.0 / base;
  r.sdnn_ms = base / 20.0;
  r.std_hr_bpm = 3.0 + base / 1000.0;
  r.vlf_power_ms2 = base / 4.0;
  r.lf_power_ms2 = base;
  r.hf_power_ms2 = base / 2.0;
  r.total_power_ms2 = r.vlf_power_ms2 + r.lf_power_ms2 + r.hf_power_ms2;
  return r;
}

}  // namespace

TEST_CASE("identical sequences match completely") {
  std::mt19937_64 rng(1);
  const auto seq = IbiSequence::from_beats(varied_beats(rng, 40), Feature::Onset);
  const auto a = align(seq, seq);
  CHECK(a.pairs.size() == seq.size());
  CHECK(a.unmatched_true == 0);
  CHECK(a.unmatched_est == 0);
  CHECK(a.coverage() == 1.0);
  for (std::size_t i = 0; i < a.pairs.size(); ++i) CHECK(a.pairs[i].true_ibi_ms == a.pairs[i].est_ibi_ms);
}

TEST_CASE("a deleted beat leaves two true and one estimated interval unmatched") {
  std::mt19937_64 rng(2);
  const auto beats = varied_beats(rng, 30);
  auto missing = beats;
  missing.erase(missing.begin() + 14);
  const auto a = align(IbiSequence::from_beats(beats, Feature::Onset), IbiSequence::from_beats(missing, Feature::Onset));
  CHECK(a.unmatched_true == 2);
  CHECK(a.unmatched_est == 1);
  CHECK(a.pairs.size() == beats.size() - 3);
}

TEST_CASE("a uniform 50 ms shift still matches every interval") {
  std::mt19937_64 rng(3);
  const auto beats = varied_beats(rng, 30);
  auto shifted = beats;
  for (double& b : shifted) b += 0.05;
  const auto truth = IbiSequence::from_beats(beats, Feature::Onset);
  const auto a = align(truth, IbiSequence::from_beats(shifted, Feature::Onset));
  CHECK(a.unmatched_true == 0);
  CHECK(a.unmatched_est == 0);
  for (const auto& p : a.pairs) CHECK(p.est_ibi_ms == doctest::Approx(p.true_ibi_ms).epsilon(1e-9));
}

TEST_CASE("empty input is rejected") {
  const auto seq = testing::ibis_from_values({800, 800});
  CHECK_THROWS_AS(align(IbiSequence{}, seq), Error);
  CHECK_THROWS_AS(align(seq, IbiSequence{}), Error);
}

TEST_CASE("alignment properties on random edits") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> edits(0, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto beats = varied_beats(rng, 20 + trial % 17);
    auto est_beats = beats;
    for (int k = edits(rng); k > 0 && est_beats.size() > 3; --k)
      est_beats.erase(est_beats.begin() + static_cast<long>(u(rng) * static_cast<double>(est_beats.size() - 1)));
    for (int k = edits(rng); k > 0; --k) est_beats.push_back(beats.front() + u(rng) * (beats.back() - beats.front()));
    std::normal_distribution<double> wobble(0.0, 0.02);
    for (double& b : est_beats) b += wobble(rng);
    std::sort(est_beats.begin(), est_beats.end());
    est_beats.erase(std::unique(est_beats.begin(), est_beats.end()), est_beats.end());

    const auto truth = IbiSequence::from_beats(beats, Feature::Onset);
    const auto est = IbiSequence::from_beats(est_beats, Feature::Onset);
    const auto a = align(truth, est);
    const auto b = align(est, truth);
    CHECK(a.pairs.size() <= std::min(truth.size(), est.size()));
    CHECK(a.pairs.size() + a.unmatched_true == truth.size());
    CHECK(a.pairs.size() + a.unmatched_est == est.size());
    CHECK(b.unmatched_true == a.unmatched_est);
    CHECK(b.unmatched_est == a.unmatched_true);

    // Each pair's end beats agree within the tolerance.
    for (const auto& p : a.pairs) {
      const double tol = 0.5 * 0.5 * (p.true_ibi_ms + p.est_ibi_ms) / 1000.0;
      const auto it = std::lower_bound(est_beats.begin(), est_beats.end(), p.true_beat_t_s - tol - 1e-12);
      REQUIRE(it != est_beats.end());
      CHECK(std::abs(*it - p.true_beat_t_s) <= tol + 1e-12);
    }
  }
}

TEST_CASE("ibi metrics against a plain oracle") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 30.0);
  std::vector<double> t, e;
  for (int i = 0; i < 50; ++i) {
    t.push_back(800.0 + n(rng));
    e.push_back(t.back() + 0.3 * n(rng));
  }
  const auto m = ibi_metrics(pairs_of(t, e));
  REQUIRE(m.corr.has_value());
  CHECK(*m.corr == doctest::Approx(naive_corr(t, e)).epsilon(1e-9));
  double mape = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) mape += std::abs(t[i] - e[i]) / t[i];
  CHECK(m.mape_pct == doctest::Approx(100.0 * mape / static_cast<double>(t.size())).epsilon(1e-12));
  CHECK(m.pairs == t.size());
}

TEST_CASE("perfect and proportional estimates") {
  const std::vector<double> t{700, 820, 760, 900, 810};
  const auto same = ibi_metrics(pairs_of(t, t));
  CHECK(*same.corr == doctest::Approx(1.0));
  CHECK(same.mape_pct == 0.0);
  std::vector<double> up = t;
  for (double& v : up) v *= 1.1;
  const auto m = ibi_metrics(pairs_of(t, up));
  CHECK(m.mape_pct == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(*m.corr == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("corr is affine invariant and mape permutation invariant") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(600.0, 1000.0), a(0.1, 10.0), b(-500.0, 500.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> t(25), e(25);
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = u(rng);
      e[i] = 0.5 * t[i] + 0.5 * u(rng);
    }
    const auto base = ibi_metrics(pairs_of(t, e));
    std::vector<double> e2 = e;
    const double sa = a(rng), sb = b(rng);
    for (double& v : e2) v = sa * v + sb + 2000.0;
    CHECK(*ibi_metrics(pairs_of(t, e2)).corr == doctest::Approx(*base.corr).epsilon(1e-9));

    std::vector<std::size_t> idx(t.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<double> tp, ep;
    for (auto i : idx) {
      tp.push_back(t[i]);
      ep.push_back(e[i]);
    }
    CHECK(ibi_metrics(pairs_of(tp, ep)).mape_pct == doctest::Approx(base.mape_pct).epsilon(1e-12));
  }
}

TEST_CASE("zero variance gives an undefined correlation") {
  const std::vector<double> t{800, 800, 800, 800}, e{790, 810, 800, 805};
  CHECK_FALSE(ibi_metrics(pairs_of(t, e)).corr.has_value());
  CHECK_FALSE(ibi_metrics(pairs_of(e, t)).corr.has_value());
  CHECK(format_corr(std::nullopt) == "undefined");
}

TEST_CASE("fewer than three pairs is rejected") {
  CHECK_THROWS_AS(ibi_metrics(pairs_of({800, 810}, {800, 810})), Error);
}

TEST_CASE("hrv metrics across subjects") {
  std::vector<HrvReport> truth{report_from(700), report_from(850), report_from(1000), report_from(920)};
  const auto same = hrv_metrics(truth, truth);
  for (const auto& p : same) {
    REQUIRE(p.corr.has_value());
    CHECK(*p.corr == doctest::Approx(1.0));
    CHECK(p.mape_pct == 0.0);
  }
  CHECK(same[0].name == "mean_rr_ms");
  CHECK(same[7].name == "total_power_ms2");

  auto est = truth;
  for (auto& r : est) r.sdnn_ms *= 1.05;
  const auto m = hrv_metrics(truth, est);
  CHECK(m[2].mape_pct == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(m[0].mape_pct == 0.0);

  CHECK_THROWS_AS(hrv_metrics({truth[0], truth[1]}, {truth[0], truth[1]}), Error);
  CHECK_THROWS_AS(hrv_metrics(truth, {truth[0]}), Error);
}

TEST_CASE("subject report aggregates") {
  const auto one = subject_report({{"s1", 0.9, 3.0, 0.95}});
  CHECK(*one.average.corr == doctest::Approx(0.9));
  CHECK(*one.sd.corr == 0.0);
  CHECK(one.sd.mape_pct == 0.0);

  const auto two = subject_report({{"s1", 0.9, 2.0, 1.0}, {"s2", 0.7, 4.0, 0.8}});
  CHECK(*two.average.corr == doctest::Approx(0.8));
  CHECK(*two.sd.corr == doctest::Approx(0.1));
  CHECK(two.average.mape_pct == doctest::Approx(3.0));
  CHECK(two.sd.mape_pct == doctest::Approx(1.0));
  CHECK(two.average.subject == "Average");
  CHECK(two.sd.subject == "SD");

  const auto csv = subject_report_csv(two);
  CHECK(csv.rfind("subject,corr,mape_pct,coverage\n", 0) == 0);
  CHECK(csv.find("\nAverage,0.8000,3.000,") != std::string::npos);
  const auto nd = subject_report_ndjson(two);
  CHECK(std::count(nd.begin(), nd.end(), '\n') == 4);
}

TEST_CASE("undefined correlations are left out of the average") {
  const auto r = subject_report({{"s1", std::nullopt, 1.0, 1.0}, {"s2", 0.5, 3.0, 1.0}});
  CHECK(*r.average.corr == doctest::Approx(0.5));
  CHECK(r.average.mape_pct == doctest::Approx(2.0));
  CHECK(subject_report_csv(r).find("s1,undefined,") != std::string::npos);
}
