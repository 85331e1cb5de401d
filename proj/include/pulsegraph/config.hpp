#pragma once

#include <filesystem>
#include <string>

#include "pulsegraph/fusion.hpp"
#include "pulsegraph/features.hpp"
#include "pulsegraph/hr_prior.hpp"
#include "pulsegraph/hrv.hpp"
#include "pulsegraph/ibi_graph.hpp"
#include "pulsegraph/signal_prep.hpp"

namespace pulsegraph {

/// Every tunable of the pipeline. Defaults are the shipped behaviour.
struct PipelineConfig {
  double working_rate_hz{500.0};
  FilterSpec single_channel_filter{FilterSpec::band_pass(0.5, 15.0)};
  FilterSpec two_channel_filter{FilterSpec::band_pass(0.7, 15.0)};
  bool smoothing{true};
  SmoothingSplineOptions spline;
  FeatureOptions features;
  PenaltyConfig penalty;
  double hr_window_s{8.0};
  SpectralHrOptions spectral;
  FusionOptions fusion;
  HrvOptions hrv;
  double ecg_highpass_hz{0.5};
  RPeakOptions rpeaks;
  double align_tolerance{0.5};
};

/// TOML-style text: `[section]` headers, `key = value` lines, `#` comments.
/// Unknown keys and malformed values raise ParseError with the line number.
PipelineConfig parse_config(const std::string& text, const std::string& origin = "<config>");
PipelineConfig load_config(const std::filesystem::path& path);

/// Explicit path wins; otherwise $PULSEGRAPH_CONFIG; otherwise defaults.
PipelineConfig resolve_config(const std::filesystem::path& explicit_path);

/// Deterministic JSON echo of the effective configuration.
std::string config_json(const PipelineConfig& cfg);

}  // namespace pulsegraph
