#include "pulsegraph/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "pulsegraph/error.hpp"

namespace pulsegraph {

std::vector<IbiCandidate> SegmentBundle::candidates() const {
  std::vector<IbiCandidate> all = onset;
  for (const auto* subset : {&peak, &slope})
    for (const auto& c : *subset) {
      const bool dup = std::any_of(all.begin(), all.end(), [&](const IbiCandidate& o) {
        return o.start_s == c.start_s && o.ibi_ms == c.ibi_ms;
      });
      if (!dup) all.push_back(c);
    }
  return all;
}

std::vector<SegmentBundle> segment(const IbiSequence& onset, const IbiSequence& peak, const IbiSequence& slope,
                                   const HrPrior& prior) {
  if (onset.empty()) throw Error(ErrorCode::EmptyResult, "fusion needs a non-empty onset sequence");
  const std::size_t n = onset.size();
  std::vector<SegmentBundle> out;

  auto onset_range = [&](SegmentBundle& b, std::size_t first, std::size_t last) {
    for (std::size_t k = first; k < last; ++k) {
      b.onset.push_back({onset.starts_s[k], onset.ibis_ms[k], Feature::Onset});
      b.avg_ibis_ms.push_back(avg_ibi_at(prior, onset.starts_s[k]));
      if (k == first && onset.is_break(k)) b.break_before = true;
    }
  };

  // Peak / slope intervals are consumed in order; each lands in at most one segment.
  std::size_t pk = 0, sl = 0;
  auto take = [](const IbiSequence& seq, std::size_t& cursor, double t0, double t1, Feature f,
                 std::vector<IbiCandidate>& dst) {
    while (cursor < seq.size() && seq.starts_s[cursor] < t0) ++cursor;
    while (cursor < seq.size() && seq.starts_s[cursor] < t1) {
      dst.push_back({seq.starts_s[cursor], seq.ibis_ms[cursor], f});
      ++cursor;
    }
  };

  // Segmentation restarts after every path discontinuity so that no segment spans a gap.
  std::vector<std::size_t> run_starts{0};
  for (std::size_t k : onset.segment_breaks)
    if (k > 0 && k < n) run_starts.push_back(k);
  run_starts.push_back(n);

  for (std::size_t r = 0; r + 1 < run_starts.size(); ++r) {
    const std::size_t run_begin = run_starts[r], run_end = run_starts[r + 1];
    const std::size_t full = (run_end - run_begin) / 3;
    for (std::size_t p = 0; p < full; ++p) {
      SegmentBundle b;
      b.index = out.size();
      const std::size_t first = run_begin + 3 * p;
      b.t_start_s = onset.starts_s[first];
      b.t_end_s = first + 3 < run_end ? onset.starts_s[first + 3] : onset.end_s(first + 2);
      onset_range(b, first, first + 3);
      take(peak, pk, b.t_start_s, b.t_end_s, Feature::SystolicPeak, b.peak);
      take(slope, sl, b.t_start_s, b.t_end_s, Feature::MaxSlope, b.slope);
      out.push_back(std::move(b));
    }
    const std::size_t rest = run_begin + 3 * full;
    if (rest < run_end) {
      SegmentBundle b;
      b.index = out.size();
      b.terminal = true;
      b.t_start_s = onset.starts_s[rest];
      b.t_end_s = onset.end_s(run_end - 1);
      onset_range(b, rest, run_end);
      out.push_back(std::move(b));
    }
  }
  return out;
}

double fusion_objective(const std::array<double, 3>& slots, const std::vector<double>& avg) {
  return std::abs(slots[0] - avg[0]) + std::abs(slots[1] - avg[1]) + std::abs(slots[2] - avg[2]);
}

FusedTriple fuse_segment(const SegmentBundle& b, const FusionOptions& opts) {
  const auto cand = b.candidates();
  if (cand.size() < 3 || b.avg_ibis_ms.size() != 3)
    throw Error(ErrorCode::InvalidInput, "fuse_segment needs three onset intervals");
  const std::size_t n = cand.size();

  FusedTriple best;
  best.objective = std::numeric_limits<double>::infinity();
  int best_onsets = -1;
  auto onsets = [&](std::size_t j, std::size_t k, std::size_t l) {
    return int(cand[j].source == Feature::Onset) + int(cand[k].source == Feature::Onset) +
           int(cand[l].source == Feature::Onset);
  };
  auto starts = [&](std::size_t j, std::size_t k, std::size_t l) {
    return std::make_tuple(cand[j].start_s, cand[k].start_s, cand[l].start_s);
  };

  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      if (opts.temporal_order && cand[k].start_s < cand[j].start_s) continue;
      for (std::size_t l = 0; l < n; ++l) {
        if (l == j || l == k) continue;
        if (opts.temporal_order && cand[l].start_s < cand[k].start_s) continue;
        const double obj = fusion_objective({cand[j].ibi_ms, cand[k].ibi_ms, cand[l].ibi_ms}, b.avg_ibis_ms);
        const int ons = onsets(j, k, l);
        bool better = obj < best.objective;
        if (obj == best.objective) {
          if (ons != best_onsets)
            better = ons > best_onsets;
          else
            better = starts(j, k, l) < starts(best.index[0], best.index[1], best.index[2]);
        }
        if (better) {
          best.objective = obj;
          best.index = {j, k, l};
          best_onsets = ons;
        }
      }
    }
  for (int s = 0; s < 3; ++s) best.chosen[s] = cand[best.index[s]];
  return best;
}

IbiSequence fuse(const IbiSequence& onset, const IbiSequence& peak, const IbiSequence& slope, const HrPrior& prior,
                 const FusionOptions& opts) {
  const auto bundles = segment(onset, peak, slope, prior);
  IbiSequence out;
  out.source = Feature::Fused;
  for (const auto& b : bundles) {
    if (b.break_before && !out.empty()) out.segment_breaks.push_back(out.size());
    if (b.terminal) {
      for (const auto& c : b.onset) {
        out.starts_s.push_back(c.start_s);
        out.ibis_ms.push_back(c.ibi_ms);
      }
      continue;
    }
    const auto triple = fuse_segment(b, opts);
    double t = b.t_start_s;
    for (const auto& c : triple.chosen) {
      out.starts_s.push_back(t);
      out.ibis_ms.push_back(c.ibi_ms);
      t += c.ibi_ms / 1000.0;
    }
  }
  return out;
}

}  // namespace pulsegraph
