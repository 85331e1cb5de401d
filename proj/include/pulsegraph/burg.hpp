#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace pulsegraph {

template <typename Scalar>
struct ArModel {
  // a[0] == 1; x[n] + sum_k a[k] x[n-k] = e[n]
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> a;
  Scalar noise_variance{0};

  /// One-sided power spectral density at `freq` for a series sampled at `rate`.
  Scalar psd(Scalar freq, Scalar rate) const {
    std::complex<Scalar> denom(0, 0);
    const Scalar w = -2 * std::numbers::pi_v<Scalar> * freq / rate;
    for (Eigen::Index k = 0; k < a.size(); ++k) denom += a[k] * std::polar(Scalar(1), w * static_cast<Scalar>(k));
    return 2 * noise_variance / (rate * std::norm(denom));
  }

  /// Frequencies (non-negative, Hz) of the model's poles.
  std::vector<Scalar> pole_frequencies(Scalar rate) const {
    const Eigen::Index p = a.size() - 1;
    std::vector<Scalar> out;
    if (p < 1) return out;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> companion =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(p, p);
    for (Eigen::Index k = 0; k < p; ++k) companion(0, k) = -a[k + 1];
    for (Eigen::Index k = 1; k < p; ++k) companion(k, k - 1) = 1;
    Eigen::EigenSolver<decltype(companion)> solver(companion, false);
    if (solver.info() != Eigen::Success) return out;
    for (const auto& z : solver.eigenvalues()) {
      const Scalar f = std::arg(z) * rate / (2 * std::numbers::pi_v<Scalar>);
      if (f >= 0) out.push_back(f);
    }
    return out;
  }
};

/// Burg's maximum-entropy AR estimate of a zero-mean series.
template <typename Derived>
ArModel<typename Derived::Scalar> burg(const Eigen::MatrixBase<Derived>& x, int order) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = x.size();
  ArModel<Scalar> model;
  model.a = Vec::Zero(order + 1);
  model.a[0] = 1;
  model.noise_variance = x.squaredNorm() / static_cast<Scalar>(n);
  if (model.noise_variance == Scalar(0)) return model;

  Vec fwd = x;
  Vec bwd = x;
  for (int m = 1; m <= order && m < n; ++m) {
    const Eigen::Index len = n - m;
    const auto f = fwd.tail(len);
    const auto b = bwd.head(len);
    const Scalar den = f.squaredNorm() + b.squaredNorm();
    if (den == Scalar(0)) break;
    const Scalar k = Scalar(-2) * f.dot(b) / den;

    const Vec f_new = f + k * b;
    const Vec b_new = b + k * f;
    fwd.tail(len) = f_new;
    bwd.head(len) = b_new;

    const Vec prev = model.a.head(m + 1);
    for (int i = 1; i <= m; ++i) model.a[i] = prev[i] + k * (i == m ? prev[0] : prev[m - i]);
    model.noise_variance *= (Scalar(1) - k * k);
  }
  return model;
}

}  // namespace pulsegraph
