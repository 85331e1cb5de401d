#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>

#include "pulsegraph/config.hpp"
#include "pulsegraph/eval.hpp"
#include "pulsegraph/session.hpp"

namespace pulsegraph {

enum class ChannelSet { Ppg1, Ppg2, Both };

/// "1", "2" or "1,2". Anything else → InvalidInput.
ChannelSet parse_channel_set(std::string_view s);
std::string_view to_string(ChannelSet c);

/// Resample to the working rate, band-pass, then smooth.
Waveform preprocess(const Waveform& raw, const FilterSpec& band, const PipelineConfig& cfg);

struct PipelineResult {
  std::string session_id;
  std::string subject;
  ChannelSet channels{ChannelSet::Ppg1};
  HrPrior prior;
  // Systolic peak, max slope, onset, fused.
  std::array<IbiSequence, 4> ibis;
  std::optional<IbiSequence> truth;
  std::array<std::optional<AlignedPairs>, 4> aligned;
  std::array<std::optional<IbiMetrics>, 4> metrics;
  std::optional<HrvReport> hrv;
  std::optional<HrvReport> true_hrv;

  const IbiSequence& fused() const { return ibis[3]; }
};

/// The whole chain in memory. Errors are rethrown with the failing stage named.
PipelineResult run_pipeline(const Session& session, const PipelineConfig& cfg, ChannelSet channels);

/// Truth IBIs from annotated R-peaks, else from the ECG channel, else nullopt.
std::optional<IbiSequence> reference_ibis(const Session& session, const PipelineConfig& cfg);

/// Writes ibis_{peak,slope,onset,fused}.csv, hrv.json, metrics.json, the two plot-data
/// files and a config echo into `out_dir`, each atomically.
void write_outputs(const PipelineResult& r, const PipelineConfig& cfg, const std::filesystem::path& out_dir);

std::string hrv_json(const std::optional<HrvReport>& est, const std::optional<HrvReport>& truth,
                     const std::string& session_id);
std::string metrics_json(const PipelineResult& r);

}  // namespace pulsegraph
