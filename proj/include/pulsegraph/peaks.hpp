#pragma once

#include <vector>

#include <Eigen/Dense>

namespace pulsegraph {

struct PeakOptions {
  // Minimum index distance between kept peaks; taller peaks win (0 disables).
  Eigen::Index min_distance{0};
  double min_prominence{0.0};
  // Absolute floor on the peak value (-inf disables).
  double min_height{-std::numeric_limits<double>::infinity()};
};

/// Local maxima of `x` (plateaus report their midpoint), filtered by height, then
/// distance, then prominence. Returned indices are increasing.
std::vector<Eigen::Index> find_peaks(const Eigen::Ref<const Eigen::VectorXd>& x, const PeakOptions& opts = {});

/// Topographic prominence of each listed peak.
std::vector<double> peak_prominences(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const std::vector<Eigen::Index>& peaks);

/// Sub-sample offset in (-0.5, 0.5) of the vertex of the parabola through x[i-1..i+1].
double parabolic_offset(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Index i);

}  // namespace pulsegraph
