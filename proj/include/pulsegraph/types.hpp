#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pulsegraph {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Uniformly sampled channel. Sample k sits at t0_s + k / sample_rate_hz.
template <typename Scalar>
struct BasicWaveform {
  VectorX<Scalar> samples;
  Scalar sample_rate_hz{1};
  Scalar t0_s{0};

  Eigen::Index size() const { return samples.size(); }
  bool empty() const { return samples.size() == 0; }
  Scalar time_at(Scalar k) const { return t0_s + k / sample_rate_hz; }
  Scalar duration_s() const { return static_cast<Scalar>(samples.size()) / sample_rate_hz; }
  Scalar end_s() const { return time_at(static_cast<Scalar>(samples.size() - 1)); }
};

using Waveform = BasicWaveform<double>;

enum class Feature : std::uint8_t { SystolicPeak, MaxSlope, Onset, Fused };

std::string_view to_string(Feature f);
Feature feature_from_string(std::string_view name);

/// Candidate beat instants for one morphological feature of one channel.
struct FiducialSeries {
  Feature feature{Feature::SystolicPeak};
  int channel_id{1};
  std::vector<double> timestamps_s;
  // Candidates within this many seconds of either record end are flagged.
  double edge_margin_s{1.0};
  double span_begin_s{0};
  double span_end_s{0};

  std::size_t size() const { return timestamps_s.size(); }
  bool empty() const { return timestamps_s.empty(); }
  bool edge_unreliable(std::size_t k) const {
    const double t = timestamps_s[k];
    return t < span_begin_s + edge_margin_s || t > span_end_s - edge_margin_s;
  }
};

/// Interbeat intervals as (start timestamp, duration) pairs.
///
/// Sequences produced from a beat path satisfy
/// ibis_ms[k] == (beat[k+1] - beat[k]) * 1000 within each continuous run.
/// `segment_breaks` lists the indices k whose interval starts a new run
/// because the beat path was interrupted before it; intervals spanning such
/// a discontinuity are never emitted.
struct IbiSequence {
  std::vector<double> starts_s;
  std::vector<double> ibis_ms;
  Feature source{Feature::Onset};
  std::vector<std::size_t> segment_breaks;

  std::size_t size() const { return ibis_ms.size(); }
  bool empty() const { return ibis_ms.empty(); }
  double end_s(std::size_t k) const { return starts_s[k] + ibis_ms[k] / 1000.0; }
  bool is_break(std::size_t k) const;

  /// Successive differences of beat instants; `breaks_before` holds beat
  /// indices that open a new run (the interval leading into them is dropped).
  static IbiSequence from_beats(const std::vector<double>& beats_s, Feature source,
                                const std::vector<std::size_t>& breaks_before = {});

  Eigen::Map<const Eigen::VectorXd> values() const {
    return {ibis_ms.data(), static_cast<Eigen::Index>(ibis_ms.size())};
  }
};

}  // namespace pulsegraph
