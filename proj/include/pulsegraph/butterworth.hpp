#pragma once

#include <complex>

#include <Eigen/Dense>

namespace pulsegraph {

/// Cascade of biquads, one row per section: b0 b1 b2 a0 a1 a2 (a0 == 1).
using SosMatrix = Eigen::Matrix<double, Eigen::Dynamic, 6, Eigen::RowMajor>;

/// Digital Butterworth designs through the bilinear transform with
/// frequency prewarping. `order` is the analog prototype order, so a
/// band-pass design has 2 * order poles.
SosMatrix butter_lowpass(int order, double cutoff_hz, double sample_rate_hz);
SosMatrix butter_highpass(int order, double cutoff_hz, double sample_rate_hz);
SosMatrix butter_bandpass(int order, double low_hz, double high_hz, double sample_rate_hz);

/// Complex frequency response of the cascade at `freq_hz`.
std::complex<double> sos_response(const SosMatrix& sos, double freq_hz, double sample_rate_hz);

/// Causal direct-form-II-transposed filtering, zero initial state.
Eigen::VectorXd sos_filter(const SosMatrix& sos, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Forward-backward filtering with odd reflection padding of `pad` samples
/// and steady-state initial conditions on both passes.
Eigen::VectorXd sos_filtfilt(const SosMatrix& sos, const Eigen::Ref<const Eigen::VectorXd>& x,
                             Eigen::Index pad);

/// Samples for the slowest pole of the cascade to decay below `tol`.
Eigen::Index settling_length(const SosMatrix& sos, double tol = 1e-6);

}  // namespace pulsegraph
