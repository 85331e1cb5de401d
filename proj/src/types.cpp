#include "pulsegraph/types.hpp"

#include <algorithm>
#include <string>

#include "pulsegraph/error.hpp"

namespace pulsegraph {

std::string_view to_string(Feature f) {
  switch (f) {
    case Feature::SystolicPeak: return "peak";
    case Feature::MaxSlope: return "slope";
    case Feature::Onset: return "onset";
    case Feature::Fused: return "fused";
  }
  return "unknown";
}

Feature feature_from_string(std::string_view name) {
  if (name == "peak" || name == "systolic_peak") return Feature::SystolicPeak;
  if (name == "slope" || name == "max_slope") return Feature::MaxSlope;
  if (name == "onset") return Feature::Onset;
  if (name == "fused") return Feature::Fused;
  throw Error(ErrorCode::InvalidInput, "unknown feature '" + std::string(name) + "'");
}

bool IbiSequence::is_break(std::size_t k) const {
  return std::binary_search(segment_breaks.begin(), segment_breaks.end(), k);
}

IbiSequence IbiSequence::from_beats(const std::vector<double>& beats_s, Feature source,
                                    const std::vector<std::size_t>& breaks_before) {
  IbiSequence out;
  out.source = source;
  bool pending_break = false;
  for (std::size_t k = 0; k + 1 < beats_s.size(); ++k) {
    if (std::find(breaks_before.begin(), breaks_before.end(), k + 1) != breaks_before.end()) {
      // The interval into beat k+1 crosses a discontinuity.
      pending_break = !out.empty();
      continue;
    }
    if (pending_break) {
      out.segment_breaks.push_back(out.size());
      pending_break = false;
    }
    out.starts_s.push_back(beats_s[k]);
    out.ibis_ms.push_back((beats_s[k + 1] - beats_s[k]) * 1000.0);
  }
  return out;
}

}  // namespace pulsegraph
