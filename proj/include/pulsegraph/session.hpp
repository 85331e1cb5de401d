#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "pulsegraph/types.hpp"

namespace pulsegraph {

struct ChannelRef {
  std::string file;
  double sample_rate_hz{0};
};

struct SessionManifest {
  std::string session_id;
  std::string subject;
  std::string activity;
  ChannelRef ppg1;
  std::optional<ChannelRef> ppg2;
  std::optional<ChannelRef> ecg;
  // `t_s,hr_bpm` reference HR track used as the beat-spacing prior.
  std::optional<std::string> hr_file;
  // `t_s` list of annotated R-peaks; preferred over ECG detection when present.
  std::optional<std::string> rpeaks_file;
};

struct Session {
  std::filesystem::path dir;
  SessionManifest manifest;
  Waveform ppg1;
  std::optional<Waveform> ppg2;
  std::optional<Waveform> ecg;
  std::optional<FiducialSeries> rpeaks;
};

/// Reads `manifest.json` and every channel it references. Missing ppg1 or bad rates →
/// ManifestError; malformed CSV → ParseError naming file and line.
Session ingest(const std::filesystem::path& dir);
SessionManifest parse_manifest(const std::string& json_text, const std::string& origin = "manifest.json");
std::string manifest_json(const SessionManifest& m);

/// `t_s,value` CSV (header optional). Timestamps set t0; spacing comes from the rate.
Waveform read_signal_csv(const std::filesystem::path& path, double sample_rate_hz);
std::string signal_csv(const Waveform& w);

std::vector<double> read_time_list(const std::filesystem::path& path);
std::string time_list_csv(const std::vector<double>& t_s);

/// `beat_t_s,ibi_ms,source,segment_break`.
std::string ibi_csv(const IbiSequence& ibis);
IbiSequence parse_ibi_csv(const std::string& text, const std::string& origin = "<ibis>");

/// Shortest decimal that round-trips.
std::string format_number(double v);

std::string read_text(const std::filesystem::path& path);
/// Writes through a sibling temp file and renames into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Writes the manifest plus channel CSVs; channel file names come from the manifest.
void write_session(const std::filesystem::path& dir, const Session& s);

}  // namespace pulsegraph
