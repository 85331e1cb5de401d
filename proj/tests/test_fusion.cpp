#include <doctest.h>

#include "oracles.hpp"
#include "pulsegraph/error.hpp"
#include "pulsegraph/fusion.hpp"
#include "support.hpp"

using namespace pulsegraph;

namespace {

const HrPrior k75({0.0}, {75.0});

SegmentBundle bundle(std::vector<double> onset, std::vector<double> peak, std::vector<double> slope,
                     std::vector<double> avg = {800, 800, 800}) {
  SegmentBundle b;
  double t = 0.0;
  for (double v : onset) {
    b.onset.push_back({t, v, Feature::Onset});
    t += v / 1000.0;
  }
  b.t_end_s = t;
  double s = 0.01;
  for (double v : peak) b.peak.push_back({s += 0.05, v, Feature::SystolicPeak});
  s = 0.02;
  for (double v : slope) b.slope.push_back({s += 0.05, v, Feature::MaxSlope});
  b.avg_ibis_ms = std::move(avg);
  return b;
}

IbiSequence with_source(IbiSequence s, Feature f) {
  s.source = f;
  return s;
}

}  // namespace

TEST_CASE("segment counts and remainder") {
  std::vector<double> nine(9, 800.0), ten(10, 800.0);
  const auto s9 = segment(testing::ibis_from_values(nine), {}, {}, k75);
  CHECK(s9.size() == 3);
  for (const auto& b : s9) CHECK_FALSE(b.terminal);
  const auto s10 = segment(testing::ibis_from_values(ten), {}, {}, k75);
  REQUIRE(s10.size() == 4);
  CHECK(s10.back().terminal);
  CHECK(s10.back().onset.size() == 1);
  for (const auto& b : s10) CHECK(b.avg_ibis_ms.size() == b.onset.size());
  CHECK_THROWS_AS(segment(IbiSequence{}, {}, {}, k75), Error);
}

TEST_CASE("peak and slope intervals land in the segment holding their start") {
  const IbiSequence onset = testing::ibis_from_values(std::vector<double>(6, 800.0));
  // Four peak and three slope intervals start inside the first segment [0, 2.4).
  IbiSequence peak, slope;
  for (double t : {0.1, 0.9, 1.7, 2.3}) {
    peak.starts_s.push_back(t);
    peak.ibis_ms.push_back(790.0);
  }
  for (double t : {0.05, 0.85, 1.65, 2.45}) {
    slope.starts_s.push_back(t);
    slope.ibis_ms.push_back(805.0);
  }
  const auto seg = segment(onset, with_source(peak, Feature::SystolicPeak), with_source(slope, Feature::MaxSlope), k75);
  REQUIRE(seg.size() == 2);
  CHECK(seg[0].peak.size() == 4);
  CHECK(seg[0].slope.size() == 3);
  CHECK(seg[0].candidates().size() == 10);
  CHECK(seg[1].slope.size() == 1);
  for (const auto& b : seg)
    for (const auto* set : {&b.peak, &b.slope})
      for (const auto& c : *set) {
        CHECK(c.start_s >= b.t_start_s);
        CHECK(c.start_s < b.t_end_s);
      }
}

TEST_CASE("exact matches give objective zero") {
  const auto b = bundle({800, 800, 800}, {650, 950, 820}, {790, 805, 1100});
  const FusedTriple f = fuse_segment(b);
  CHECK(f.objective == 0.0);
  for (const auto& c : f.chosen) CHECK(c.ibi_ms == 800.0);
  for (const auto& c : f.chosen) CHECK(c.source == Feature::Onset);
}

TEST_CASE("small candidate set: brute-force objective 210") {
  SegmentBundle b = bundle({700, 900, 810}, {1200}, {});
  const auto ref = oracle::min_triple(b.candidates(), b.avg_ibis_ms, false);
  CHECK(ref.objective == 210.0);
  FusionOptions free;
  free.temporal_order = false;
  CHECK(fuse_segment(b, free).objective == 210.0);
  CHECK(fuse_segment(b).objective == 210.0);
}

TEST_CASE("equal values at different indices are distinct candidates") {
  // Two peak intervals share a value; both may be chosen.
  SegmentBundle b = bundle({500, 500, 500}, {800, 800}, {800});
  const FusedTriple f = fuse_segment(b);
  CHECK(f.objective == 0.0);
  CHECK(f.index[0] != f.index[1]);
  CHECK(f.index[1] != f.index[2]);
  CHECK(f.index[0] != f.index[2]);
}

TEST_CASE("ties prefer onset members, then earlier starts") {
  // Peak offers the same values as onset: onset wins.
  SegmentBundle b = bundle({790, 810, 800}, {790, 810}, {});
  const FusedTriple f = fuse_segment(b);
  for (const auto& c : f.chosen) CHECK(c.source == Feature::Onset);
}

TEST_CASE("fuse_segment attains the brute-force minimum on random segments") {
  std::mt19937_64 rng(17);
  for (bool ordered : {true, false}) {
    FusionOptions opts;
    opts.temporal_order = ordered;
    int mismatches = 0;
    for (int trial = 0; trial < 500; ++trial) {
      const SegmentBundle b = oracle::random_segment(rng);
      const auto cand = b.candidates();
      const auto ref = oracle::min_triple(cand, b.avg_ibis_ms, ordered);
      const FusedTriple got = fuse_segment(b, opts);
      mismatches += got.objective != ref.objective;
      // The chosen indices are one of the minimizers.
      CHECK(std::find(ref.argmins.begin(), ref.argmins.end(), got.index) != ref.argmins.end());
    }
    CHECK(mismatches == 0);
  }
}

TEST_CASE("identical inputs fuse to the input") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(800.0, 40.0);
  std::vector<double> v;
  for (int k = 0; k < 31; ++k) v.push_back(std::round(n(rng)));
  const IbiSequence onset = testing::ibis_from_values(v, 2.0);
  const IbiSequence fused = fuse(onset, with_source(onset, Feature::SystolicPeak), with_source(onset, Feature::MaxSlope), k75);
  CHECK(fused.ibis_ms == onset.ibis_ms);
  CHECK(fused.source == Feature::Fused);
}

TEST_CASE("fused length is 3q + remainder and timestamps increase") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(800.0, 60.0);
  for (int len : {3, 4, 5, 17, 30}) {
    std::vector<double> a, b, c;
    for (int k = 0; k < len; ++k) {
      a.push_back(n(rng));
      b.push_back(n(rng));
      c.push_back(n(rng));
    }
    const IbiSequence fused = fuse(testing::ibis_from_values(a), with_source(testing::ibis_from_values(b), Feature::SystolicPeak),
                                   with_source(testing::ibis_from_values(c), Feature::MaxSlope), k75);
    CHECK(fused.size() == static_cast<std::size_t>(len));
    for (std::size_t k = 1; k < fused.size(); ++k) CHECK(fused.starts_s[k] > fused.starts_s[k - 1]);
  }
}

TEST_CASE("segments never span an onset break") {
  IbiSequence onset = testing::ibis_from_values(std::vector<double>(8, 800.0));
  onset.segment_breaks = {4};
  const auto seg = segment(onset, {}, {}, k75);
  // Run 1: 4 intervals (1 full + 1 leftover); run 2: 4 intervals.
  REQUIRE(seg.size() == 4);
  CHECK(seg[2].break_before);
  const IbiSequence fused = fuse(onset, {}, {}, k75);
  CHECK(fused.size() == 8);
  CHECK(fused.segment_breaks == std::vector<std::size_t>{4});
}
