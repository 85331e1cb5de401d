#pragma once

#include <filesystem>
#include <vector>

#include "pulsegraph/types.hpp"

namespace pulsegraph {

inline constexpr double kMinHrBpm = 30.0;
inline constexpr double kMaxHrBpm = 240.0;

/// Windowed average heart rate used as the beat-spacing prior. Immutable once built.
class HrPrior {
 public:
  HrPrior() = default;
  /// Throws RangeError for HR outside [30, 240] bpm and InvalidInput for
  /// mismatched lengths or non-increasing window centers.
  HrPrior(std::vector<double> window_centers_s, std::vector<double> hr_bpm, double window_len_s = 8.0);

  bool empty() const { return centers_.empty(); }
  std::size_t size() const { return centers_.size(); }
  const std::vector<double>& window_centers_s() const { return centers_; }
  const std::vector<double>& hr_bpm() const { return hr_; }
  double window_len_s() const { return window_len_s_; }

  /// HR of the window whose center is nearest to t (ties go to the earlier window).
  double hr_at(double t_s) const;

 private:
  std::vector<double> centers_;
  std::vector<double> hr_;
  double window_len_s_{8.0};
};

/// 60000 / HR of the nearest window, in ms. Throws MissingPrior on an empty prior.
double avg_ibi_at(const HrPrior& prior, double t_s);

struct SpectralHrOptions {
  double window_len_s{8.0};
  double step_s{2.0};
  double min_hz{0.5};
  double max_hz{4.0};
  double max_jump_bpm{15.0};
  // Windows are block-averaged down to roughly this rate before the FFT.
  double analysis_rate_hz{50.0};
  int fft_size{4096};
};

/// Spectral HR tracker: dominant peak per sliding window, constrained to stay within
/// `max_jump_bpm` of the previous window. Throws InvalidInput for records shorter than
/// one window and MissingPrior when no spectral peak exists.
HrPrior estimate_hr_spectral(const Waveform& ppg, const SpectralHrOptions& opts = {});

/// CSV with optional header `t_s,hr_bpm`. ParseError carries the line number.
HrPrior load_hr_file(const std::filesystem::path& path, double window_len_s = 8.0);
HrPrior parse_hr_csv(const std::string& text, double window_len_s = 8.0);

}  // namespace pulsegraph
