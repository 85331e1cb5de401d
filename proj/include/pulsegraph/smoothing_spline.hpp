#pragma once

#include <Eigen/Dense>

namespace pulsegraph {

struct SmoothingSplineOptions {
  int degree{5};
  double knot_spacing_s{0.020};
  // Order of the coefficient difference penalty.
  int penalty_order{3};
  // Negative selects the smoothing weight automatically so that the residual
  // RMS matches the estimated white-noise floor.
  double lambda{-1.0};
};

struct SmoothingSplineFit {
  Eigen::VectorXd fitted;
  Eigen::VectorXd coefficients;
  double lambda{0};
  double residual_rms{0};
  double noise_floor{0};
};

/// Penalized least-squares fit of a uniform-knot B-spline to equally spaced samples.
SmoothingSplineFit fit_smoothing_spline(const Eigen::Ref<const Eigen::VectorXd>& y,
                                        double sample_rate_hz,
                                        const SmoothingSplineOptions& opts = {});

/// Robust white-noise SD from the MAD of second differences.
double estimate_noise_floor(const Eigen::Ref<const Eigen::VectorXd>& y);

/// Values of the `degree + 1` uniform B-spline basis functions that are non-zero at
/// fractional position u in [0, 1) of a knot interval.
Eigen::VectorXd uniform_bspline_weights(int degree, double u);

/// Natural cubic spline through (x, y) evaluated at `xq`; x strictly increasing.
Eigen::VectorXd natural_cubic_spline(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& y,
                                     const Eigen::Ref<const Eigen::VectorXd>& xq);

}  // namespace pulsegraph
