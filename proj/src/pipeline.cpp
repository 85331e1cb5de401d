#include "pulsegraph/pipeline.hpp"

#include <json.hpp>

#include "pulsegraph/error.hpp"
#include "pulsegraph/features.hpp"
#include "pulsegraph/fusion.hpp"
#include "pulsegraph/hrv.hpp"
#include "pulsegraph/ibi_graph.hpp"
#include "pulsegraph/resample.hpp"

namespace pulsegraph {

namespace {

constexpr std::array<Feature, 3> kFeatures = {Feature::SystolicPeak, Feature::MaxSlope, Feature::Onset};

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(name) + ": " + e.detail());
  }
}

nlohmann::ordered_json report_json(const HrvReport& r) {
  nlohmann::ordered_json j;
  const auto v = r.values();
  for (std::size_t i = 0; i < HrvReport::kParameters; ++i) j[HrvReport::names()[i]] = v[i];
  return j;
}

nlohmann::ordered_json metric_json(const std::optional<IbiMetrics>& m) {
  if (!m) return nullptr;
  nlohmann::ordered_json j;
  j["corr"] = m->corr ? nlohmann::ordered_json(*m->corr) : nlohmann::ordered_json("undefined");
  j["mape_pct"] = m->mape_pct;
  j["coverage"] = m->coverage;
  j["pairs"] = m->pairs;
  return j;
}

}  // namespace

ChannelSet parse_channel_set(std::string_view s) {
  if (s == "1") return ChannelSet::Ppg1;
  if (s == "2") return ChannelSet::Ppg2;
  if (s == "1,2" || s == "2,1" || s == "both") return ChannelSet::Both;
  throw Error(ErrorCode::InvalidInput, "channels must be 1, 2 or 1,2 (got '" + std::string(s) + "')");
}

std::string_view to_string(ChannelSet c) {
  switch (c) {
    case ChannelSet::Ppg1: return "ppg1";
    case ChannelSet::Ppg2: return "ppg2";
    case ChannelSet::Both: return "ppg1+ppg2";
  }
  return "?";
}

Waveform preprocess(const Waveform& raw, const FilterSpec& band, const PipelineConfig& cfg) {
  Waveform w = raw.sample_rate_hz == cfg.working_rate_hz ? raw : resample(raw, cfg.working_rate_hz);
  w = filter(w, band);
  if (cfg.smoothing) w = smooth_spline(w, cfg.spline);
  return w;
}

std::optional<IbiSequence> reference_ibis(const Session& s, const PipelineConfig& cfg) {
  std::vector<double> beats;
  if (s.rpeaks) {
    beats = s.rpeaks->timestamps_s;
  } else if (s.ecg) {
    const Waveform hp = filter(*s.ecg, FilterSpec::high_pass(cfg.ecg_highpass_hz));
    beats = ecg_r_peaks(hp, cfg.rpeaks).timestamps_s;
  } else {
    return std::nullopt;
  }
  return IbiSequence::from_beats(beats, Feature::Onset);
}

PipelineResult run_pipeline(const Session& s, const PipelineConfig& cfg, ChannelSet channels) {
  PipelineResult r;
  r.session_id = s.manifest.session_id;
  r.subject = s.manifest.subject;
  r.channels = channels;
  if (channels != ChannelSet::Ppg1 && !s.ppg2)
    throw Error(ErrorCode::ManifestError, "ingest: session has no ppg2 channel");

  const FilterSpec& band = channels == ChannelSet::Both ? cfg.two_channel_filter : cfg.single_channel_filter;
  const auto [c1, c2] = stage("preprocess", [&] {
    std::optional<Waveform> a, b;
    if (channels != ChannelSet::Ppg2) a = preprocess(s.ppg1, band, cfg);
    if (channels != ChannelSet::Ppg1) b = preprocess(*s.ppg2, band, cfg);
    return std::pair{a, b};
  });
  const Waveform& primary = c1 ? *c1 : *c2;

  r.prior = stage("hr_prior", [&] {
    if (s.manifest.hr_file) return load_hr_file(s.dir / *s.manifest.hr_file, cfg.hr_window_s);
    return estimate_hr_spectral(primary, cfg.spectral);
  });

  for (std::size_t f = 0; f < kFeatures.size(); ++f) {
    r.ibis[f] = stage("ibi_graph", [&] {
      const Feature feat = kFeatures[f];
      BeatGraph g = channels == ChannelSet::Both
                        ? build_graph_two_channel(candidates(feat, *c1, cfg.features, 1),
                                                  candidates(feat, *c2, cfg.features, 2), r.prior,
                                                  cfg.penalty.window_factor)
                        : build_graph(candidates(feat, primary, cfg.features, c1 ? 1 : 2), r.prior,
                                      cfg.penalty.window_factor);
      return shortest_path(g, cfg.penalty, feat).ibis;
    });
  }
  r.ibis[3] = stage("fusion", [&] { return fuse(r.ibis[2], r.ibis[0], r.ibis[1], r.prior, cfg.fusion); });

  r.hrv = stage("hrv", [&]() -> std::optional<HrvReport> {
    try {
      return hrv_report(r.fused(), cfg.hrv);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidInput) return std::nullopt;  // record too short
      throw;
    }
  });

  r.truth = stage("reference", [&] { return reference_ibis(s, cfg); });
  if (r.truth && r.truth->size() >= 2) {
    stage("eval", [&] {
      for (std::size_t f = 0; f < r.ibis.size(); ++f) {
        if (r.ibis[f].empty()) continue;
        r.aligned[f] = align(*r.truth, r.ibis[f], cfg.align_tolerance);
        if (r.aligned[f]->pairs.size() >= 3) r.metrics[f] = ibi_metrics(*r.aligned[f]);
      }
      try {
        r.true_hrv = hrv_report(*r.truth, cfg.hrv);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InvalidInput) throw;
      }
      return 0;
    });
  }
  return r;
}

std::string hrv_json(const std::optional<HrvReport>& est, const std::optional<HrvReport>& truth,
                     const std::string& session_id) {
  nlohmann::ordered_json j;
  j["session_id"] = session_id;
  j["estimated"] = est ? report_json(*est) : nlohmann::ordered_json(nullptr);
  j["true"] = truth ? report_json(*truth) : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

std::string metrics_json(const PipelineResult& r) {
  nlohmann::ordered_json j;
  j["session_id"] = r.session_id;
  j["subject"] = r.subject;
  j["channelset"] = to_string(r.channels);
  for (std::size_t f = 0; f < r.ibis.size(); ++f) {
    const std::string name(to_string(f < 3 ? kFeatures[f] : Feature::Fused));
    j["features"][name] = metric_json(r.metrics[f]);
    j["counts"][name] = r.ibis[f].size();
  }
  j["counts"]["true"] = r.truth ? r.truth->size() : 0;
  return j.dump(2) + "\n";
}

void write_outputs(const PipelineResult& r, const PipelineConfig& cfg, const std::filesystem::path& out) {
  for (std::size_t f = 0; f < r.ibis.size(); ++f) {
    const std::string name(to_string(f < 3 ? kFeatures[f] : Feature::Fused));
    write_atomic(out / ("ibis_" + name + ".csv"), ibi_csv(r.ibis[f]));
  }
  write_atomic(out / "hrv.json", hrv_json(r.hrv, r.true_hrv, r.session_id));
  write_atomic(out / "metrics.json", metrics_json(r));
  write_atomic(out / "config.json", config_json(cfg));

  std::string timeline = "beat_t_s,series,ibi_ms\n";
  auto add = [&](const IbiSequence& s, std::string_view name) {
    for (std::size_t k = 0; k < s.size(); ++k)
      timeline += format_number(s.starts_s[k]) + "," + std::string(name) + "," + format_number(s.ibis_ms[k]) + "\n";
  };
  if (r.truth) add(*r.truth, "true");
  for (std::size_t f = 0; f < r.ibis.size(); ++f) add(r.ibis[f], to_string(f < 3 ? kFeatures[f] : Feature::Fused));
  write_atomic(out / "plotdata_ibi_timeline.csv", timeline);

  std::string scatter = "parameter,true,estimated\n";
  if (r.hrv && r.true_hrv) {
    const auto e = r.hrv->values();
    const auto t = r.true_hrv->values();
    for (std::size_t i = 0; i < HrvReport::kParameters; ++i)
      scatter += std::string(HrvReport::names()[i]) + "," + format_number(t[i]) + "," + format_number(e[i]) + "\n";
  }
  write_atomic(out / "plotdata_hrv_scatter.csv", scatter);
}

}  // namespace pulsegraph
