#include "pulsegraph/peaks.hpp"

#include <algorithm>
#include <numeric>

namespace pulsegraph {

std::vector<Eigen::Index> find_peaks(const Eigen::Ref<const Eigen::VectorXd>& x, const PeakOptions& opts) {
  std::vector<Eigen::Index> peaks;
  const Eigen::Index n = x.size();
  Eigen::Index i = 1;
  while (i < n - 1) {
    if (x[i - 1] < x[i]) {
      Eigen::Index ahead = i + 1;
      while (ahead < n - 1 && x[ahead] == x[i]) ++ahead;
      if (x[ahead] < x[i]) {
        peaks.push_back((i + ahead - 1) / 2);
        i = ahead;
        continue;
      }
    }
    ++i;
  }

  std::erase_if(peaks, [&](Eigen::Index p) { return x[p] < opts.min_height; });

  if (opts.min_distance > 1 && peaks.size() > 1) {
    std::vector<std::size_t> order(peaks.size());
    std::iota(order.begin(), order.end(), 0);
    // Tallest first; equal heights keep the earlier peak.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[peaks[a]] > x[peaks[b]]; });
    std::vector<bool> keep(peaks.size(), true);
    for (std::size_t idx : order) {
      if (!keep[idx]) continue;
      for (std::size_t j = idx; j-- > 0 && peaks[idx] - peaks[j] < opts.min_distance;) keep[j] = false;
      for (std::size_t j = idx + 1; j < peaks.size() && peaks[j] - peaks[idx] < opts.min_distance; ++j)
        keep[j] = false;
    }
    std::vector<Eigen::Index> kept;
    for (std::size_t k = 0; k < peaks.size(); ++k)
      if (keep[k]) kept.push_back(peaks[k]);
    peaks = std::move(kept);
  }

  if (opts.min_prominence > 0.0 && !peaks.empty()) {
    const auto prom = peak_prominences(x, peaks);
    std::vector<Eigen::Index> kept;
    for (std::size_t k = 0; k < peaks.size(); ++k)
      if (prom[k] >= opts.min_prominence) kept.push_back(peaks[k]);
    peaks = std::move(kept);
  }
  return peaks;
}

std::vector<double> peak_prominences(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const std::vector<Eigen::Index>& peaks) {
  std::vector<double> prom;
  prom.reserve(peaks.size());
  const Eigen::Index n = x.size();
  for (Eigen::Index p : peaks) {
    const double h = x[p];
    double left_min = h;
    for (Eigen::Index i = p; i >= 0 && x[i] <= h; --i) left_min = std::min(left_min, x[i]);
    double right_min = h;
    for (Eigen::Index i = p; i < n && x[i] <= h; ++i) right_min = std::min(right_min, x[i]);
    prom.push_back(h - std::max(left_min, right_min));
  }
  return prom;
}

double parabolic_offset(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Index i) {
  if (i <= 0 || i >= x.size() - 1) return 0.0;
  const double a = x[i - 1], b = x[i], c = x[i + 1];
  const double denom = a - 2.0 * b + c;
  if (denom >= 0.0) return 0.0;
  return std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
}

}  // namespace pulsegraph
