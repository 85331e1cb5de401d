#pragma once

#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "pulsegraph/error.hpp"

namespace pulsegraph {

/// Pearson correlation; nullopt when either series has zero variance.
template <typename DerivedA, typename DerivedB>
std::optional<typename DerivedA::Scalar> pearson(const Eigen::MatrixBase<DerivedA>& a,
                                                 const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size() || a.size() < 2) throw Error(ErrorCode::InvalidInput, "pearson: size mismatch");
  const auto da = (a.array() - a.mean()).eval();
  const auto db = (b.array() - b.mean()).eval();
  const Scalar saa = da.square().sum();
  const Scalar sbb = db.square().sum();
  if (saa == Scalar(0) || sbb == Scalar(0)) return std::nullopt;
  return (da * db).sum() / std::sqrt(saa * sbb);
}

/// Mean absolute percentage error of `estimate` against `truth`.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar mape_pct(const Eigen::MatrixBase<DerivedA>& truth, const Eigen::MatrixBase<DerivedB>& estimate) {
  if (truth.size() != estimate.size() || truth.size() == 0) throw Error(ErrorCode::InvalidInput, "mape: size mismatch");
  return ((truth.array() - estimate.array()).abs() / truth.array().abs()).mean() * 100;
}

template <typename Derived>
typename Derived::Scalar population_sd(const Eigen::MatrixBase<Derived>& v) {
  return std::sqrt((v.array() - v.mean()).square().mean());
}

}  // namespace pulsegraph
