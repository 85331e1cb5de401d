#pragma once

#include <array>
#include <vector>

#include "pulsegraph/hr_prior.hpp"
#include "pulsegraph/types.hpp"

namespace pulsegraph {

struct IbiCandidate {
  double start_s{0};
  double ibi_ms{0};
  Feature source{Feature::Onset};

  friend bool operator==(const IbiCandidate&, const IbiCandidate&) = default;
};

/// One fusion segment: three consecutive onset intervals plus every peak / slope
/// interval starting inside [t_start_s, t_end_s). A terminal segment holds the
/// one or two onset intervals left over and is passed through unfused.
struct SegmentBundle {
  std::size_t index{0};
  double t_start_s{0};
  double t_end_s{0};
  std::vector<IbiCandidate> onset;
  std::vector<IbiCandidate> peak;
  std::vector<IbiCandidate> slope;
  // Prior IBI at each onset interval start.
  std::vector<double> avg_ibis_ms;
  bool terminal{false};
  // A path discontinuity precedes or falls inside this segment.
  bool break_before{false};

  /// Union of the three subsets, onset first; exact (start, duration) duplicates collapse.
  std::vector<IbiCandidate> candidates() const;
};

struct FusionOptions {
  // Chosen intervals must have non-decreasing start times across the three slots.
  bool temporal_order{true};
};

struct FusedTriple {
  std::array<std::size_t, 3> index{};  // into SegmentBundle::candidates()
  std::array<IbiCandidate, 3> chosen{};
  double objective{0};
};

/// Throws EmptyResult when the onset sequence is empty.
std::vector<SegmentBundle> segment(const IbiSequence& onset, const IbiSequence& peak, const IbiSequence& slope,
                                   const HrPrior& prior);

/// Objective for assigning `slots` to the three prior IBIs.
double fusion_objective(const std::array<double, 3>& slots, const std::vector<double>& avg_ibis_ms);

/// Exhaustive minimum over ordered triples of distinct candidates. Ties prefer more
/// onset members, then earlier start times.
FusedTriple fuse_segment(const SegmentBundle& b, const FusionOptions& opts = {});

IbiSequence fuse(const IbiSequence& onset, const IbiSequence& peak, const IbiSequence& slope, const HrPrior& prior,
                 const FusionOptions& opts = {});

}  // namespace pulsegraph
