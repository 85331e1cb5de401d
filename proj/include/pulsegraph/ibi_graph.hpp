#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "pulsegraph/hr_prior.hpp"
#include "pulsegraph/types.hpp"

namespace pulsegraph {

/// Edge weight lambda * d^exponent for a deviation d (seconds) from the expected predecessor.
struct PenaltyConfig {
  double lambda{1.0};
  int exponent{2};
  // Neighbor window as a multiple of the prior average IBI.
  double window_factor{1.5};

  double operator()(double deviation_s) const;
};

void validate(const PenaltyConfig& cfg);

/// Candidate beats as a DAG. Vertex i connects back to every earlier vertex j with
/// 0 < v_i - v_j < window_factor * avg IBI_i; those neighbors occupy the contiguous
/// index range [neighbor_first[i], neighbor_last[i]). The DP state (weights, prev)
/// is filled by `shortest_path`.
struct BeatGraph {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::vector<double> vertices_s;
  std::vector<int> channel;
  std::vector<double> avg_ibi_ms;
  std::vector<std::size_t> neighbor_first;
  std::vector<std::size_t> neighbor_last;
  std::vector<double> weights;
  std::vector<std::size_t> prev;
  // Vertex opened a new path segment because it had no neighbors.
  std::vector<bool> gap_start;

  std::size_t size() const { return vertices_s.size(); }
  std::size_t neighbor_count(std::size_t i) const { return neighbor_last[i] - neighbor_first[i]; }
};

/// Throws EmptyResult for empty candidates and MissingPrior for an empty prior.
BeatGraph build_graph(const FiducialSeries& candidates, const HrPrior& prior, double window_factor = 1.5);

/// Both channels merged and time-sorted (ties keep channel order); same neighbor rule.
BeatGraph build_graph_two_channel(const FiducialSeries& c1, const FiducialSeries& c2, const HrPrior& prior,
                                  double window_factor = 1.5);

/// Graph over raw timestamps (sorted non-decreasing) with per-vertex prior IBIs.
BeatGraph build_graph(std::vector<double> vertices_s, std::vector<double> avg_ibi_ms, double window_factor = 1.5);

struct BeatPath {
  std::vector<std::size_t> chosen;
  // Positions in `chosen` that open a new segment after a gap.
  std::vector<std::size_t> breaks_before;
  // Accumulated weight of the destination vertex (the final segment).
  double destination_weight{0};
  // Sum of edge weights along every chosen segment.
  double total_weight{0};
  IbiSequence ibis;
};

/// Minimum-weight backward path with the convex penalty. Fills g.weights / g.prev.
BeatPath shortest_path(BeatGraph& g, const PenaltyConfig& cfg = {}, Feature source = Feature::Onset);

}  // namespace pulsegraph
